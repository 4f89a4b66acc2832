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

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "qmlab/experiment.hpp"
#include "qmlab/parallel.hpp"
#include "qmlab/projective_sampling.hpp"
#include "qmlab/qstate.hpp"

namespace qmlab {

//=========================================================================
// Coherent measurements
//
// The system Hilbert space is the d-th symmetric power of an n-dimensional
// "direction" space; its dimension is N = C(n+d-1, d). Directions phi embed
// as coherent vectors coh(phi) with multinomial-square-root components, so
// that <coh(phi)|coh(psi)> = (<phi|psi>)^d. The measurement outcome is a
// direction, distributed as N <coh(phi)|w|coh(phi)> against the uniform
// measure on the direction space; the post-state is the pure coherent state
// at the outcome. For n = 2 and d = 2s this is a spin-s system and the
// measurement reads off the spin axis.
//=========================================================================

// Dimension of the degree-d symmetric power, C(n+d-1, d), computed as an
// exact integer product. Throws Overflow when the count does not fit.
inline std::uint64_t sym_dim(Eigen::Index n, Eigen::Index d) {
  if (n < 1 || d < 0) throw BadArgument("sym_dim: need n >= 1, d >= 0");
  std::uint64_t r = 1;
  for (Eigen::Index i = 1; i <= d; ++i) {
    const std::uint64_t factor = static_cast<std::uint64_t>(n - 1 + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw Overflow("sym_dim: binomial coefficient overflows");
    }
    r = r * factor / static_cast<std::uint64_t>(i);
  }
  return r;
}

/// Basis bookkeeping for one symmetric power: the nondecreasing multi-indices
/// of length d over {0..n-1} in lexicographic order (the library's storage
/// order for symmetric components), their multiplicity factorials, and the
/// multinomial-square-root coefficients.
struct VeroneseConfig {
  Eigen::Index base_dim = 0;  // n
  Eigen::Index degree = 0;    // d
  Eigen::Index sym_dim = 0;   // N
  std::vector<std::vector<Eigen::Index>> multi_indices;
  std::vector<double> coefficients;  // sqrt(d! / prod m_i!)

  static VeroneseConfig make(Eigen::Index n, Eigen::Index d) {
    if (n < 1 || d < 1) throw BadArgument("VeroneseConfig: need n, d >= 1");
    const std::uint64_t count = qmlab::sym_dim(n, d);
    if (count > static_cast<std::uint64_t>(1) << 20) {
      throw Overflow("VeroneseConfig: symmetric dimension too large");
    }
    VeroneseConfig cfg;
    cfg.base_dim = n;
    cfg.degree = d;
    cfg.sym_dim = static_cast<Eigen::Index>(count);

    double d_factorial = 1.0;
    for (Eigen::Index i = 2; i <= d; ++i) d_factorial *= double(i);

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      double m_factorials = 1.0;
      Eigen::Index run = 1;
      for (std::size_t t = 1; t < idx.size(); ++t) {
        run = (idx[t] == idx[t - 1]) ? run + 1 : 1;
        m_factorials *= double(run);
      }
      cfg.multi_indices.push_back(idx);
      cfg.coefficients.push_back(std::sqrt(d_factorial / m_factorials));

      // next nondecreasing multi-index in lexicographic order
      std::size_t t = idx.size();
      while (t > 0 && idx[t - 1] == n - 1) --t;
      if (t == 0) break;
      const Eigen::Index v = idx[t - 1] + 1;
      for (std::size_t u = t - 1; u < idx.size(); ++u) idx[u] = v;
    }
    return cfg;
  }

  // Spin-s system: two-dimensional direction space at degree d = 2s.
  // Half-integer spins are accepted whenever 2s is a whole number.
  static VeroneseConfig spin(double s) {
    const double two_s = 2.0 * s;
    const double rounded = std::round(two_s);
    if (s <= 0.0 || std::abs(two_s - rounded) > 1e-9) {
      throw BadArgument("VeroneseConfig::spin: 2s must be a positive integer");
    }
    return make(2, static_cast<Eigen::Index>(rounded));
  }
};

// Raw symmetric-power components of an arbitrary vector; no normalization.
// The norm satisfies |out| = |phi|^degree.
inline ComplexVector veronese_components(const ComplexVector& phi,
                                         const VeroneseConfig& cfg) {
  if (phi.size() != cfg.base_dim) {
    throw DimMismatch("veronese_components: direction dimension mismatch");
  }
  ComplexVector out(cfg.sym_dim);
  for (Eigen::Index k = 0; k < cfg.sym_dim; ++k) {
    Complex prod = cfg.coefficients[static_cast<std::size_t>(k)];
    for (const Eigen::Index i : cfg.multi_indices[static_cast<std::size_t>(k)]) {
      prod *= phi(i);
    }
    out(k) = prod;
  }
  return out;
}

/// A coherent vector: the symmetric d-th power of a direction.
struct CoherentVector {
  VeroneseConfig config;
  PureState direction;
  ComplexVector components;  // unit norm for a unit direction
};

inline CoherentVector veronese_embed(const PureState& phi,
                                     const VeroneseConfig& cfg) {
  return CoherentVector{cfg, phi, veronese_components(phi.vector(), cfg)};
}

inline CoherentVector veronese_embed(const PureState& phi, Eigen::Index d) {
  return veronese_embed(phi, VeroneseConfig::make(phi.dim(), d));
}

// Outcome density of the coherent measurement relative to the uniform
// measure on directions: N <coh(phi)|w|coh(phi)>. The leading factor N is
// fixed by the total probability law; the resolution of the identity it
// expresses is verified by check_coherent_resolution.
inline double coherent_density(const DensityMatrix& w, const PureState& phi,
                               const VeroneseConfig& cfg) {
  if (w.dim() != cfg.sym_dim) {
    throw DimMismatch("coherent_density: state must live in the symmetric space");
  }
  const ComplexVector z = veronese_components(phi.vector(), cfg);
  const double overlap = (z.adjoint() * w.matrix() * z)(0, 0).real();
  return static_cast<double>(cfg.sym_dim) * std::max(0.0, overlap);
}

/// Rejection sampler for the coherent outcome distribution; proposals are
/// uniform directions, envelope N * lambda_max(w).
class CoherentSampler {
 public:
  CoherentSampler(DensityMatrix w, VeroneseConfig cfg)
      : w_(std::move(w)),
        cfg_(std::move(cfg)),
        lambda_max_(hermitian_eigenvalues(w_.matrix()).maxCoeff()) {
    if (w_.dim() != cfg_.sym_dim) {
      throw DimMismatch("CoherentSampler: state must live in the symmetric space");
    }
  }

  const VeroneseConfig& config() const { return cfg_; }

  Sample<PureState> draw(RandomStream& rng) const {
    const double scale = static_cast<double>(cfg_.sym_dim);
    for (;;) {
      const PureState phi = sample_fs_uniform(cfg_.base_dim, rng);
      const ComplexVector z = veronese_components(phi.vector(), cfg_);
      const double overlap = (z.adjoint() * w_.matrix() * z)(0, 0).real();
      if (rng.uniform() < std::max(0.0, overlap) / lambda_max_) {
        DensityMatrix post = DensityMatrix::pure(PureState::normalized(z));
        return Sample<PureState>{phi, std::move(post),
                                 scale * std::max(0.0, overlap), 0, 0};
      }
    }
  }

 private:
  DensityMatrix w_;
  VeroneseConfig cfg_;
  double lambda_max_;
};

inline Sample<PureState> sample_coherent(const DensityMatrix& w,
                                         const VeroneseConfig& cfg,
                                         RandomStream& rng) {
  return CoherentSampler(w, cfg).draw(rng);
}

// Monte Carlo check that N * E[|coh(phi)><coh(phi)|] over uniform directions
// is the identity on the symmetric space.
inline DeviationReport check_coherent_resolution(const VeroneseConfig& cfg,
                                                 std::size_t n_samples,
                                                 std::uint64_t seed,
                                                 int threads = 1) {
  const auto est = mc_integrate_matrix(
      [&cfg](const PureState& phi) {
        const ComplexVector z = veronese_components(phi.vector(), cfg);
        return ComplexMatrix(static_cast<double>(cfg.sym_dim) * z *
                             z.adjoint());
      },
      cfg.base_dim, n_samples, seed, threads);
  return compare_estimate(
      est, ComplexMatrix::Identity(cfg.sym_dim, cfg.sym_dim));
}

inline ContinuousExperiment<PureState> coherent_experiment(
    const VeroneseConfig& cfg) {
  ContinuousExperiment<PureState> exp;
  const Eigen::Index n = cfg.base_dim;
  exp.sample_base = [n](RandomStream& rng) { return sample_fs_uniform(n, rng); };
  const double scale = std::sqrt(static_cast<double>(cfg.sym_dim));
  exp.transform_density = [cfg, scale](const PureState& phi) {
    const ComplexVector z = veronese_components(phi.vector(), cfg);
    return KrausSet::make({scale * z * z.adjoint()});
  };
  return exp;
}

//=========================================================================
// Spin-one geometry checks (n = 2, d = 2)
//=========================================================================

// Residual of the degree-two rational-curve equation in the symmetric basis
// {11, 12, 22}: 2 z0 z2 - z1². Vanishes exactly on coherent vectors.
inline Complex conic_residual(const ComplexVector& z) {
  if (z.size() != 3) throw DimMismatch("conic_residual: need dim 3");
  return 2.0 * z(0) * z(2) - z(1) * z(1);
}

// Symmetric components of the symmetrization of u (x) v for qubit factors:
// (u1 v1, (u1 v2 + u2 v1)/sqrt(2), u2 v2).
inline ComplexVector sym2_components(const ComplexVector& u,
                                     const ComplexVector& v) {
  if (u.size() != 2 || v.size() != 2) {
    throw DimMismatch("sym2_components: need qubit factors");
  }
  ComplexVector out(3);
  out(0) = u(0) * v(0);
  out(1) = (u(0) * v(1) + u(1) * v(0)) / std::sqrt(2.0);
  out(2) = u(1) * v(1);
  return out;
}

// Tangency of the orthogonal-complement line: every symmetrization of the
// conjugate-raised direction with an arbitrary alpha is orthogonal to the
// conic point at phi. Returns the normalized overlap magnitude, which
// vanishes identically.
inline double tangency_check(const PureState& phi, const PureState& alpha) {
  if (phi.dim() != 2 || alpha.dim() != 2) {
    throw DimMismatch("tangency_check: need qubit states");
  }
  const auto cfg = VeroneseConfig::make(2, 2);
  const ComplexVector z = veronese_components(phi.vector(), cfg);
  const ComplexVector x =
      sym2_components(qubit_orthogonal(phi.vector()), alpha.vector());
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  return std::abs(z.dot(x)) / nx;
}

//=========================================================================
// Aggregated runs
//=========================================================================

struct CoherentOptions {
  int threads = 1;
  bool keep_samples = false;
};

/// Aggregate of N coherent-measurement trials: outcome-direction statistics
/// in both the direction space and the symmetric space.
struct CoherentRun {
  VeroneseConfig config;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<Sample<PureState>> samples;  // outcomes are directions
  ComplexMatrix direction_mean_projector;  // n x n
  RealMatrix direction_std_error;
  ComplexMatrix outcome_mean_projector;  // N x N, mean coherent projector
  RealMatrix outcome_std_error;
};

inline CoherentRun run_coherent(const DensityMatrix& w,
                                const VeroneseConfig& cfg,
                                std::size_t n_samples, std::uint64_t seed,
                                const CoherentOptions& options = {}) {
  if (n_samples < 1) throw BadArgument("run_coherent: need n_samples >= 1");
  const CoherentSampler sampler(w, cfg);
  const Eigen::Index n = cfg.base_dim;
  const Eigen::Index nsym = cfg.sym_dim;
  const std::size_t nb = block_count(n_samples);
  std::vector<ComplexMatrix> dir_sums(nb), out_sums(nb);
  std::vector<RealMatrix> dir_sqs(nb), out_sqs(nb);
  std::vector<std::vector<Sample<PureState>>> kept(nb);
  for_each_block(
      n_samples, options.threads,
      [&](std::size_t b, std::size_t first, std::size_t last) {
        ComplexMatrix ds = ComplexMatrix::Zero(n, n);
        RealMatrix ds2 = RealMatrix::Zero(n, n);
        ComplexMatrix os = ComplexMatrix::Zero(nsym, nsym);
        RealMatrix os2 = RealMatrix::Zero(nsym, nsym);
        std::vector<Sample<PureState>> local;
        if (options.keep_samples) local.reserve(last - first);
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng = RandomStream::substream(seed, i);
          Sample<PureState> sample = sampler.draw(rng);
          sample.trial_index = i;
          sample.seed = seed;
          const ComplexMatrix dp = sample.outcome.projector();
          ds += dp;
          ds2 += dp.cwiseAbs2();
          const ComplexMatrix& op = sample.post_state.matrix();
          os += op;
          os2 += op.cwiseAbs2();
          if (options.keep_samples) local.push_back(std::move(sample));
        }
        dir_sums[b] = std::move(ds);
        dir_sqs[b] = std::move(ds2);
        out_sums[b] = std::move(os);
        out_sqs[b] = std::move(os2);
        kept[b] = std::move(local);
      });

  for (std::size_t b = 1; b < nb; ++b) {
    dir_sums[0] += dir_sums[b];
    dir_sqs[0] += dir_sqs[b];
    out_sums[0] += out_sums[b];
    out_sqs[0] += out_sqs[b];
  }

  CoherentRun run{cfg, seed, n_samples, {}, {}, {}, {}, {}};
  if (options.keep_samples) {
    run.samples.reserve(n_samples);
    for (auto& block : kept) {
      for (auto& s : block) run.samples.push_back(std::move(s));
    }
  }
  if (n_samples >= 2) {
    const auto dir = mc_from_totals(dir_sums[0], dir_sqs[0], n_samples);
    run.direction_mean_projector = dir.value;
    run.direction_std_error = dir.std_error;
    const auto out = mc_from_totals(out_sums[0], out_sqs[0], n_samples);
    run.outcome_mean_projector = out.value;
    run.outcome_std_error = out.std_error;
  } else {
    run.direction_mean_projector = dir_sums[0];
    run.direction_std_error = RealMatrix::Zero(n, n);
    run.outcome_mean_projector = out_sums[0];
    run.outcome_std_error = RealMatrix::Zero(nsym, nsym);
  }
  return run;
}

}  // namespace qmlab
