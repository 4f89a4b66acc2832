// Copyright 2026 The qmlab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "qmlab/experiment.hpp"
#include "qmlab/parallel.hpp"
#include "qmlab/projective_sampling.hpp"
#include "qmlab/qstate.hpp"

namespace qmlab {

//=========================================================================
// State-determined measurement with pure-state outcomes
//
// The outcome space is the projective space of the system itself; the
// transformation density at a point x is the rank-one map
// sqrt(n) P_x (.) sqrt(n) P_x, so the outcome distribution is
// rho(x) = n <Z|w|Z> against the uniform measure and the post-state is the
// projector onto the outcome ray. Running many independent trials and
// averaging the outcome projectors gives the "diluted" ensemble
// (I + w)/(n + 1), from which the input is recovered by linear inversion.
//=========================================================================

inline ContinuousExperiment<PureState> tomographic_experiment(Eigen::Index n) {
  if (n < 1) throw BadArgument("tomographic_experiment: need n >= 1");
  ContinuousExperiment<PureState> exp;
  exp.sample_base = [n](RandomStream& rng) { return sample_fs_uniform(n, rng); };
  exp.transform_density = [n](const PureState& x) {
    return KrausSet::make(
        {std::sqrt(static_cast<double>(n)) * x.projector()});
  };
  return exp;
}

// Closed form of the outcome-ensemble state: (I + w)/(n + 1). The maximally
// mixed state is its fixed point.
inline DensityMatrix expected_ensemble(const DensityMatrix& w) {
  const Eigen::Index n = w.dim();
  return DensityMatrix::make(
      (ComplexMatrix::Identity(n, n) + w.matrix()) /
      (static_cast<double>(n) + 1.0));
}

struct Reconstruction {
  // (n+1) * ensemble - I; Hermitian but possibly indefinite under sampling
  // noise. Reported alongside the projected estimate.
  ComplexMatrix raw;
  // Nearest valid state by eigenvalue clipping at zero and trace
  // renormalization.
  DensityMatrix projected;
};

// Linear inversion of the dilution law. Exact on exact input: feeding the
// closed-form ensemble of w returns w itself.
inline Reconstruction reconstruct(const DensityMatrix& ensemble,
                                  Eigen::Index n) {
  if (ensemble.dim() != n) {
    throw DimMismatch("reconstruct: ensemble dimension != n");
  }
  ComplexMatrix raw = (static_cast<double>(n) + 1.0) * ensemble.matrix() -
                      ComplexMatrix::Identity(n, n);
  const auto s = eig_hermitian(raw);
  ComplexMatrix clipped = ComplexMatrix::Zero(n, n);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = std::max(0.0, s.eigenvalues(i));
    if (lambda == 0.0) continue;
    clipped +=
        lambda * s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
    tr += lambda;
  }
  // raw trace is exactly 1, so at least one eigenvalue is positive
  return Reconstruction{std::move(raw),
                        DensityMatrix::make(clipped / tr, 1e-8)};
}

struct TomographyOptions {
  int threads = 1;
  bool keep_samples = false;
};

/// One complete tomography run: N independent outcome draws, the ensemble
/// estimate with componentwise standard errors, and the linear-inversion
/// reconstruction with its trace-distance diagnostics.
struct TomographyRun {
  DensityMatrix input;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<Sample<PureState>> samples;  // retained only on request
  DensityMatrix ensemble;
  RealMatrix ensemble_std_error;
  ComplexMatrix reconstruction_raw;
  DensityMatrix reconstruction;
  RealMatrix reconstruction_std_error;  // (n+1) * ensemble error
  double td_reconstruction_to_input = 0.0;
  double td_ensemble_to_expected = 0.0;
};

inline TomographyRun run_tomography(const DensityMatrix& w,
                                    std::size_t n_samples, std::uint64_t seed,
                                    const TomographyOptions& options = {}) {
  if (n_samples < 1) throw BadArgument("run_tomography: need n_samples >= 1");
  const Eigen::Index n = w.dim();
  const RhoSampler sampler(w);

  const std::size_t nb = block_count(n_samples);
  std::vector<ComplexMatrix> sums(nb);
  std::vector<RealMatrix> sqs(nb);
  std::vector<std::vector<Sample<PureState>>> kept(nb);
  for_each_block(
      n_samples, options.threads,
      [&](std::size_t b, std::size_t first, std::size_t last) {
        ComplexMatrix s = ComplexMatrix::Zero(n, n);
        RealMatrix s2 = RealMatrix::Zero(n, n);
        std::vector<Sample<PureState>> local;
        if (options.keep_samples) local.reserve(last - first);
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng = RandomStream::substream(seed, i);
          Sample<PureState> sample = sampler.draw_sample(rng);
          sample.trial_index = i;
          sample.seed = seed;
          const ComplexMatrix& p = sample.post_state.matrix();
          s += p;
          s2 += p.cwiseAbs2();
          if (options.keep_samples) local.push_back(std::move(sample));
        }
        sums[b] = std::move(s);
        sqs[b] = std::move(s2);
        kept[b] = std::move(local);
      });

  ComplexMatrix total = sums[0];
  RealMatrix total_sq = sqs[0];
  for (std::size_t b = 1; b < nb; ++b) {
    total += sums[b];
    total_sq += sqs[b];
  }

  std::vector<Sample<PureState>> samples;
  if (options.keep_samples) {
    samples.reserve(n_samples);
    for (auto& block : kept) {
      for (auto& s : block) samples.push_back(std::move(s));
    }
  }

  const double nn = static_cast<double>(n_samples);
  ComplexMatrix mean = total / nn;
  mean = 0.5 * (mean + mean.adjoint().eval());
  DensityMatrix ensemble = DensityMatrix::make(mean, 1e-8);
  const RealMatrix ensemble_se =
      n_samples >= 2 ? mc_from_totals(total, total_sq, n_samples).std_error
                     : RealMatrix::Zero(n, n);

  Reconstruction rec = reconstruct(ensemble, n);
  const double td_rec = trace_distance(rec.projected, w);
  const double td_ens = trace_distance(ensemble, expected_ensemble(w));
  return TomographyRun{w,
                       seed,
                       n_samples,
                       std::move(samples),
                       std::move(ensemble),
                       ensemble_se,
                       std::move(rec.raw),
                       std::move(rec.projected),
                       (static_cast<double>(n) + 1.0) * ensemble_se,
                       td_rec,
                       td_ens};
}

inline DensityMatrix ensemble_state(const TomographyRun& run) {
  if (run.n_samples == 0) throw EmptyRun("ensemble_state: run has no samples");
  return run.ensemble;
}

}  // namespace qmlab
