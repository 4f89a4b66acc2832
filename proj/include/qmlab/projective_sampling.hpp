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
#include <functional>

#include "qmlab/experiment.hpp"
#include "qmlab/mc.hpp"
#include "qmlab/parallel.hpp"
#include "qmlab/qstate.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

// A point of the projective space CP^{n-1}, carried by a unit representative.
using FsPoint = PureState;

//=========================================================================
// Uniform measure and the state-induced outcome density
//=========================================================================

// Uniform (unitarily invariant) point of CP^{n-1}: a normalized vector of
// independent complex Gaussians. Unitary invariance of the Gaussian law
// makes this the unique uniform probability measure on the space of rays.
inline PureState sample_fs_uniform(Eigen::Index n, RandomStream& rng) {
  if (n < 1) throw BadArgument("sample_fs_uniform: need n >= 1");
  return PureState::normalized(rng.gaussian_vector(n));
}

// Outcome density of the state-determined measurement, relative to the
// uniform probability measure: rho(x) = n <Z|w|Z> for the unit
// representative Z. Nonnegative, bounded by n * lambda_max(w), and equal to
// 1 everywhere when w is maximally mixed.
inline double density_rho(const DensityMatrix& w, const PureState& x) {
  if (w.dim() != x.dim()) {
    throw DimMismatch("density_rho: state and point dims differ");
  }
  const double overlap =
      (x.vector().adjoint() * w.matrix() * x.vector())(0, 0).real();
  return static_cast<double>(w.dim()) * std::max(0.0, overlap);
}

/// Rejection sampler for outcome points distributed as rho(x) against the
/// uniform measure. Proposals are uniform; the envelope constant
/// n * lambda_max(w) is computed once per state, and retries consume draws
/// from the caller's stream so a run is reproducible from its seed alone.
class RhoSampler {
 public:
  explicit RhoSampler(DensityMatrix w)
      : w_(std::move(w)),
        lambda_max_(hermitian_eigenvalues(w_.matrix()).maxCoeff()) {}

  const DensityMatrix& state() const { return w_; }
  double lambda_max() const { return lambda_max_; }

  PureState draw(RandomStream& rng) const {
    const Eigen::Index n = w_.dim();
    for (;;) {
      const PureState x = sample_fs_uniform(n, rng);
      const double accept =
          density_rho(w_, x) / (static_cast<double>(n) * lambda_max_);
      if (rng.uniform() < accept) return x;
    }
  }

  Sample<PureState> draw_sample(RandomStream& rng) const {
    PureState x = draw(rng);
    const double density = density_rho(w_, x);
    DensityMatrix post = DensityMatrix::pure(x);
    return Sample<PureState>{std::move(x), std::move(post), density, 0, 0};
  }

 private:
  DensityMatrix w_;
  double lambda_max_;
};

inline PureState sample_rho(const DensityMatrix& w, RandomStream& rng) {
  return RhoSampler(w).draw(rng);
}

//=========================================================================
// Monte Carlo integration against the uniform measure
//=========================================================================

// Sample mean and standard error of f over uniform points of CP^{n-1}.
// Trials use (seed, trial_index) substreams and a fixed block decomposition,
// so the estimate is identical for every thread count.
inline McScalar mc_integrate(const std::function<double(const PureState&)>& f,
                             Eigen::Index n, std::size_t n_samples,
                             std::uint64_t seed, int threads = 1) {
  if (n_samples < 2) throw BadArgument("mc_integrate: need n_samples >= 2");
  std::vector<double> sums(block_count(n_samples), 0.0);
  std::vector<double> sqs(block_count(n_samples), 0.0);
  for_each_block(n_samples, threads,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
                   double s = 0.0, s2 = 0.0;
                   for (std::size_t i = first; i < last; ++i) {
                     RandomStream rng = RandomStream::substream(seed, i);
                     const double v = f(sample_fs_uniform(n, rng));
                     s += v;
                     s2 += v * v;
                   }
                   sums[b] = s;
                   sqs[b] = s2;
                 });
  KahanSum total, total_sq;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    total.add(sums[b]);
    total_sq.add(sqs[b]);
  }
  return mc_from_totals(total.value(), total_sq.value(), n_samples);
}

inline McMatrix mc_integrate_matrix(
    const std::function<ComplexMatrix(const PureState&)>& f, Eigen::Index n,
    std::size_t n_samples, std::uint64_t seed, int threads = 1) {
  if (n_samples < 2) throw BadArgument("mc_integrate: need n_samples >= 2");
  const std::size_t nb = block_count(n_samples);
  std::vector<ComplexMatrix> sums(nb);
  std::vector<RealMatrix> sqs(nb);
  for_each_block(n_samples, threads,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
                   ComplexMatrix s;
                   RealMatrix s2;
                   bool init = false;
                   for (std::size_t i = first; i < last; ++i) {
                     RandomStream rng = RandomStream::substream(seed, i);
                     const ComplexMatrix v = f(sample_fs_uniform(n, rng));
                     if (!init) {
                       s = ComplexMatrix::Zero(v.rows(), v.cols());
                       s2 = RealMatrix::Zero(v.rows(), v.cols());
                       init = true;
                     }
                     s += v;
                     s2 += v.cwiseAbs2();
                   }
                   sums[b] = std::move(s);
                   sqs[b] = std::move(s2);
                 });
  ComplexMatrix total = sums[0];
  RealMatrix total_sq = sqs[0];
  for (std::size_t b = 1; b < nb; ++b) {
    total += sums[b];
    total_sq += sqs[b];
  }
  return mc_from_totals(total, total_sq, n_samples);
}

//=========================================================================
// Closed-form identities checked by Monte Carlo
//=========================================================================

// Second moment of the point projector under the uniform measure, as the
// n² x n² matrix E[P x P] with P = Z Z†. The closed form is
// (I + SWAP) / (n(n+1)): the projector onto the symmetric subspace scaled
// by 2/(n(n+1)). For n = 1 the estimate is exact.
inline DeviationReport check_quadratic_identity(Eigen::Index n,
                                                std::size_t n_samples,
                                                std::uint64_t seed,
                                                int threads = 1) {
  if (n < 1) throw BadArgument("check_quadratic_identity: need n >= 1");
  const auto est = mc_integrate_matrix(
      [](const PureState& x) {
        const ComplexMatrix p = x.projector();
        return tensor_product(p, p);
      },
      n, n_samples, seed, threads);
  const double nn = static_cast<double>(n);
  const ComplexMatrix expected =
      (ComplexMatrix::Identity(n * n, n * n) + swap_matrix(n)) /
      (nn * (nn + 1.0));
  return compare_estimate(est, expected);
}

// Monte Carlo estimate of the effect operator of a region A:
// E(A) = n * integral over A of the point projector. E(full space) = I.
inline HermitianOperator effect_estimate(
    const std::function<bool(const PureState&)>& region, Eigen::Index n,
    std::size_t n_samples, std::uint64_t seed, int threads = 1) {
  const auto est = mc_integrate_matrix(
      [&](const PureState& x) {
        return region(x) ? ComplexMatrix(static_cast<double>(n) * x.projector())
                         : ComplexMatrix(ComplexMatrix::Zero(n, n));
      },
      n, n_samples, seed, threads);
  return HermitianOperator::make(est.value, 1e-6);
}

}  // namespace qmlab
