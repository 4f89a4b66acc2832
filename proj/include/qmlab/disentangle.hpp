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
#include <numeric>
#include <vector>

#include "qmlab/experiment.hpp"
#include "qmlab/parallel.hpp"
#include "qmlab/projective_sampling.hpp"
#include "qmlab/qstate.hpp"

namespace qmlab {

//=========================================================================
// Disentangling measurement
//
// For a composite system the outcome space is the product of the
// constituents' pure-state spaces, embedded in the composite projective
// space as the set of product rays (the two-qubit case is the quadric cut
// out by the vanishing 2x2 determinant). The base measure is the product of
// the per-factor uniform measures; the transformation density at a product
// point xi is (prod_i d_i) <xi|w|xi> times the projector onto xi, so every
// outcome is a disentangled product of pure constituent states.
//=========================================================================

/// Factorization of a composite dimension into constituent dimensions.
struct FactorizedSystem {
  std::vector<Eigen::Index> dims;
  Eigen::Index total_dim = 0;

  static FactorizedSystem make(std::vector<Eigen::Index> dims) {
    if (dims.size() < 2) {
      throw BadArgument("FactorizedSystem: need at least two factors");
    }
    Eigen::Index total = 1;
    for (const Eigen::Index d : dims) {
      if (d < 2) throw BadArgument("FactorizedSystem: factor dims must be >= 2");
      total *= d;
    }
    return FactorizedSystem{std::move(dims), total};
  }

  std::size_t n_factors() const { return dims.size(); }
};

/// A point of the product of pure-state spaces: one unit state per factor.
struct ProductPoint {
  std::vector<PureState> factors;
};

// Tensor product of the factor vectors under the library's Kronecker
// convention (first factor major). Unit norm by construction.
inline PureState segre_embed(const ProductPoint& p) {
  if (p.factors.empty()) throw BadArgument("segre_embed: no factors");
  ComplexVector v = p.factors.front().vector();
  for (std::size_t i = 1; i < p.factors.size(); ++i) {
    v = tensor_product(v, p.factors[i].vector());
  }
  return PureState::normalized(v);
}

// Two-qubit product-ray residual: 2 * det of the 2x2 reshape of xi. Zero
// exactly on product vectors; modulus 1 on the singlet.
inline Complex quadric_residual(const PureState& xi) {
  if (xi.dim() != 4) throw DimMismatch("quadric_residual: need dim 4");
  const ComplexVector& v = xi.vector();
  return 2.0 * (v(0) * v(3) - v(1) * v(2));
}

// Largest deviation from rank one over all bipartitions of the factors:
// the second singular value of each reshape, relative to the first. Zero
// (to roundoff) iff xi is a product vector across every split.
inline double max_bipartition_rank_residual(const PureState& xi,
                                            const FactorizedSystem& sys) {
  if (xi.dim() != sys.total_dim) {
    throw DimMismatch("max_bipartition_rank_residual: dimension mismatch");
  }
  const std::size_t k = sys.n_factors();
  double worst = 0.0;
  // enumerate proper subsets containing factor 0 (each split once)
  for (std::uint64_t mask = 1; mask < (1ULL << k) - 1; mask += 2) {
    Eigen::Index rows = 1, cols = 1;
    for (std::size_t f = 0; f < k; ++f) {
      (mask >> f & 1 ? rows : cols) *= sys.dims[f];
    }
    ComplexMatrix reshaped(rows, cols);
    for (Eigen::Index flat = 0; flat < sys.total_dim; ++flat) {
      // decompose the flat index into factor digits (first factor major)
      Eigen::Index rest = flat, row = 0, col = 0;
      for (std::size_t f = 0; f < k; ++f) {
        Eigen::Index stride = 1;
        for (std::size_t g = f + 1; g < k; ++g) stride *= sys.dims[g];
        const Eigen::Index digit = rest / stride;
        rest %= stride;
        if (mask >> f & 1) {
          row = row * sys.dims[f] + digit;
        } else {
          col = col * sys.dims[f] + digit;
        }
      }
      reshaped(row, col) = xi.vector()(flat);
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(reshaped);
    const auto& s = svd.singularValues();
    if (s.size() > 1 && s(0) > 0.0) worst = std::max(worst, s(1) / s(0));
  }
  return worst;
}

// Transformation density at a product point, relative to the product of the
// per-factor uniform measures: (prod_i d_i) <xi|w|xi>. Integrates to one and
// is identically one for the maximally mixed input.
inline double disentangle_density(const DensityMatrix& w,
                                  const ProductPoint& p) {
  Eigen::Index total = 1;
  for (const auto& f : p.factors) total *= f.dim();
  if (w.dim() != total) {
    throw DimMismatch("disentangle_density: state dimension mismatch");
  }
  const ComplexVector xi = segre_embed(p).vector();
  const double overlap = (xi.adjoint() * w.matrix() * xi)(0, 0).real();
  return static_cast<double>(total) * std::max(0.0, overlap);
}

inline ProductPoint sample_product_uniform(const FactorizedSystem& sys,
                                           RandomStream& rng) {
  ProductPoint p;
  p.factors.reserve(sys.n_factors());
  for (const Eigen::Index d : sys.dims) {
    p.factors.push_back(sample_fs_uniform(d, rng));
  }
  return p;
}

/// Rejection sampler against the product-uniform base measure with envelope
/// (prod d_i) * lambda_max(w); the acceptance ratio is <xi|w|xi>/lambda_max.
class DisentangleSampler {
 public:
  DisentangleSampler(DensityMatrix w, FactorizedSystem sys)
      : w_(std::move(w)),
        sys_(std::move(sys)),
        lambda_max_(hermitian_eigenvalues(w_.matrix()).maxCoeff()) {
    if (w_.dim() != sys_.total_dim) {
      throw DimMismatch("DisentangleSampler: state dimension mismatch");
    }
  }

  const FactorizedSystem& system() const { return sys_; }

  Sample<ProductPoint> draw(RandomStream& rng) const {
    const double scale = static_cast<double>(sys_.total_dim);
    for (;;) {
      ProductPoint p = sample_product_uniform(sys_, rng);
      const double density = disentangle_density(w_, p);
      if (rng.uniform() < density / (scale * lambda_max_)) {
        DensityMatrix post = DensityMatrix::pure(segre_embed(p));
        return Sample<ProductPoint>{std::move(p), std::move(post), density, 0,
                                    0};
      }
    }
  }

 private:
  DensityMatrix w_;
  FactorizedSystem sys_;
  double lambda_max_;
};

inline Sample<ProductPoint> sample_disentangle(const DensityMatrix& w,
                                               const FactorizedSystem& sys,
                                               RandomStream& rng) {
  return DisentangleSampler(w, sys).draw(rng);
}

// Probability that the outcome lies in the region: Monte Carlo average of
// indicator * density over the product-uniform base measure.
inline McScalar region_probability(
    const DensityMatrix& w, const FactorizedSystem& sys,
    const std::function<bool(const ProductPoint&)>& region,
    std::size_t n_samples, std::uint64_t seed, int threads = 1) {
  if (w.dim() != sys.total_dim) {
    throw DimMismatch("region_probability: state dimension mismatch");
  }
  if (n_samples < 2) throw BadArgument("region_probability: need n >= 2");
  std::vector<double> sums(block_count(n_samples), 0.0);
  std::vector<double> sqs(block_count(n_samples), 0.0);
  for_each_block(n_samples, threads,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
                   double s = 0.0, s2 = 0.0;
                   for (std::size_t i = first; i < last; ++i) {
                     RandomStream rng = RandomStream::substream(seed, i);
                     const ProductPoint p = sample_product_uniform(sys, rng);
                     const double v =
                         region(p) ? disentangle_density(w, p) : 0.0;
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

inline ContinuousExperiment<ProductPoint> disentangling_experiment(
    const FactorizedSystem& sys) {
  ContinuousExperiment<ProductPoint> exp;
  exp.sample_base = [sys](RandomStream& rng) {
    return sample_product_uniform(sys, rng);
  };
  const double scale = std::sqrt(static_cast<double>(sys.total_dim));
  exp.transform_density = [scale](const ProductPoint& p) {
    return KrausSet::make({scale * segre_embed(p).projector()});
  };
  return exp;
}

// The two-qubit singlet ray (e1 x e2 - e2 x e1)/sqrt(2): the antisymmetric
// state whose density vanishes at coincident factors. "Coincident" means the
// second factor has the same components as the first in the computational
// basis; that convention fixes the pairing between the factor spaces.
inline PureState two_qubit_singlet() {
  ComplexVector psi(4);
  psi << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  return PureState::make(psi);
}

//=========================================================================
// Aggregated runs
//=========================================================================

struct DisentangleOptions {
  int threads = 1;
  bool keep_samples = false;
};

/// Aggregate of N disentangling trials: per-factor outcome statistics and
/// (optionally) the raw samples.
struct DisentangleRun {
  FactorizedSystem system;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  std::vector<Sample<ProductPoint>> samples;
  std::vector<ComplexMatrix> factor_mean_projectors;
  std::vector<RealMatrix> factor_std_errors;
};

inline DisentangleRun run_disentangle(const DensityMatrix& w,
                                      const FactorizedSystem& sys,
                                      std::size_t n_samples,
                                      std::uint64_t seed,
                                      const DisentangleOptions& options = {}) {
  if (n_samples < 1) throw BadArgument("run_disentangle: need n_samples >= 1");
  const DisentangleSampler sampler(w, sys);
  const std::size_t k = sys.n_factors();
  const std::size_t nb = block_count(n_samples);
  std::vector<std::vector<ComplexMatrix>> sums(nb);
  std::vector<std::vector<RealMatrix>> sqs(nb);
  std::vector<std::vector<Sample<ProductPoint>>> kept(nb);
  for_each_block(
      n_samples, options.threads,
      [&](std::size_t b, std::size_t first, std::size_t last) {
        std::vector<ComplexMatrix> s(k);
        std::vector<RealMatrix> s2(k);
        for (std::size_t f = 0; f < k; ++f) {
          s[f] = ComplexMatrix::Zero(sys.dims[f], sys.dims[f]);
          s2[f] = RealMatrix::Zero(sys.dims[f], sys.dims[f]);
        }
        std::vector<Sample<ProductPoint>> local;
        if (options.keep_samples) local.reserve(last - first);
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng = RandomStream::substream(seed, i);
          Sample<ProductPoint> sample = sampler.draw(rng);
          sample.trial_index = i;
          sample.seed = seed;
          for (std::size_t f = 0; f < k; ++f) {
            const ComplexMatrix p = sample.outcome.factors[f].projector();
            s[f] += p;
            s2[f] += p.cwiseAbs2();
          }
          if (options.keep_samples) local.push_back(std::move(sample));
        }
        sums[b] = std::move(s);
        sqs[b] = std::move(s2);
        kept[b] = std::move(local);
      });

  DisentangleRun run{sys, seed, n_samples, {}, {}, {}};
  if (options.keep_samples) {
    run.samples.reserve(n_samples);
    for (auto& block : kept) {
      for (auto& s : block) run.samples.push_back(std::move(s));
    }
  }
  for (std::size_t f = 0; f < k; ++f) {
    ComplexMatrix total = sums[0][f];
    RealMatrix total_sq = sqs[0][f];
    for (std::size_t b = 1; b < nb; ++b) {
      total += sums[b][f];
      total_sq += sqs[b][f];
    }
    if (n_samples >= 2) {
      const auto est = mc_from_totals(total, total_sq, n_samples);
      run.factor_mean_projectors.push_back(est.value);
      run.factor_std_errors.push_back(est.std_error);
    } else {
      run.factor_mean_projectors.push_back(
          total / static_cast<double>(n_samples));
      run.factor_std_errors.push_back(
          RealMatrix::Zero(sys.dims[f], sys.dims[f]));
    }
  }
  return run;
}

}  // namespace qmlab
