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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qmlab/coherent.hpp"
#include "qmlab/cpmap.hpp"
#include "qmlab/experiment.hpp"
#include "qmlab/qstate.hpp"

namespace qmlab::test {

template <class A, class B>
double max_abs_diff(const Eigen::MatrixBase<A>& a,
                    const Eigen::MatrixBase<B>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline ComplexMatrix random_complex_matrix(Eigen::Index n, RandomStream& rng) {
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.complex_gaussian();
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, RandomStream& rng) {
  const ComplexMatrix m = random_complex_matrix(n, rng);
  return 0.5 * (m + m.adjoint().eval());
}

// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal
// phases absorbed into Q.
inline ComplexMatrix random_unitary(Eigen::Index n, RandomStream& rng) {
  const ComplexMatrix g = random_complex_matrix(n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

inline ComplexMatrix reassemble(const SpectralDecomposition& s) {
  ComplexMatrix out =
      ComplexMatrix::Zero(s.eigenvectors.rows(), s.eigenvectors.rows());
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    out += s.eigenvalues(i) * s.eigenvectors.col(i) *
           s.eigenvectors.col(i).adjoint();
  }
  return out;
}

// Independent partial-trace route: rho_A = sum_k (I x <k|) rho (I x |k>),
// assembled from explicit embedding matrices.
inline ComplexMatrix partial_trace_oracle(const ComplexMatrix& rho,
                                          Eigen::Index d1, Eigen::Index d2,
                                          bool keep_first) {
  const Eigen::Index dk = keep_first ? d1 : d2;
  const Eigen::Index dt = keep_first ? d2 : d1;
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index k = 0; k < dt; ++k) {
    ComplexMatrix bra(dk, d1 * d2);  // (I x <k|) or (<k| x I)
    bra.setZero();
    for (Eigen::Index i = 0; i < dk; ++i) {
      const Eigen::Index col = keep_first ? i * d2 + k : k * d2 + i;
      bra(i, col) = 1.0;
    }
    out += bra * rho * bra.adjoint();
  }
  return out;
}

// Kolmogorov-Smirnov distance of a sample against the uniform CDF on [0,1].
inline double ks_uniform_statistic(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = samples[i];
    const double hi = (static_cast<double>(i) + 1.0) / n - t;
    const double lo = t - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

// Asymptotic 1% critical value for the KS statistic.
inline double ks_critical_1pct(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

// Permanent by explicit expansion over permutations; fine for d <= 6.
inline Complex permanent(const ComplexMatrix& m) {
  const Eigen::Index d = m.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
  Complex total = 0.0;
  do {
    Complex term = 1.0;
    for (Eigen::Index i = 0; i < d; ++i)
      term *= m(i, perm[static_cast<std::size_t>(i)]);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline double multiplicity_factorial(const std::vector<Eigen::Index>& idx) {
  double prod = 1.0;
  Eigen::Index run = 1;
  for (std::size_t t = 1; t < idx.size(); ++t) {
    run = (idx[t] == idx[t - 1]) ? run + 1 : 1;
    prod *= static_cast<double>(run);
  }
  return prod;
}

// Independent construction of the symmetric power of a matrix:
// S(k,l) = per(U[k|l]) / sqrt(m(k)! m(l)!), with U[k|l] the d x d matrix of
// entries picked by the multi-indices.
inline ComplexMatrix sym_power_oracle(const ComplexMatrix& u,
                                      const VeroneseConfig& cfg) {
  const Eigen::Index d = cfg.degree;
  ComplexMatrix s(cfg.sym_dim, cfg.sym_dim);
  for (Eigen::Index k = 0; k < cfg.sym_dim; ++k) {
    const auto& ki = cfg.multi_indices[static_cast<std::size_t>(k)];
    for (Eigen::Index l = 0; l < cfg.sym_dim; ++l) {
      const auto& li = cfg.multi_indices[static_cast<std::size_t>(l)];
      ComplexMatrix sub(d, d);
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
          sub(r, c) = u(ki[static_cast<std::size_t>(r)],
                        li[static_cast<std::size_t>(c)]);
      s(k, l) = permanent(sub) / std::sqrt(multiplicity_factorial(ki) *
                                           multiplicity_factorial(li));
    }
  }
  return s;
}

inline KrausSet random_cp_map(Eigen::Index n, int n_kraus, RandomStream& rng) {
  std::vector<ComplexMatrix> ops;
  for (int i = 0; i < n_kraus; ++i)
    ops.push_back(random_complex_matrix(n, rng) / double(n));
  return KrausSet::make(std::move(ops));
}

// Random trace-preserving instrument: Gaussian operators whitened by the
// inverse square root of their total effect, then split across outcomes.
inline DiscreteExperiment random_instrument(Eigen::Index n, int n_ops,
                                            int n_outcomes, RandomStream& rng) {
  std::vector<ComplexMatrix> raw;
  for (int i = 0; i < n_ops; ++i) raw.push_back(random_complex_matrix(n, rng));
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  for (const auto& a : raw) s += a.adjoint() * a;
  const auto es = eig_hermitian(s);
  ComplexMatrix inv_sqrt = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv_sqrt += (1.0 / std::sqrt(es.eigenvalues(i))) * es.eigenvectors.col(i) *
                es.eigenvectors.col(i).adjoint();
  }
  std::vector<std::vector<ComplexMatrix>> groups(
      static_cast<std::size_t>(n_outcomes));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    groups[i % static_cast<std::size_t>(n_outcomes)].push_back(raw[i] *
                                                               inv_sqrt);
  }
  std::vector<std::string> labels;
  std::vector<Transform> transforms;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    labels.push_back("o" + std::to_string(g));
    transforms.emplace_back(KrausSet::make(groups[g]));
  }
  return DiscreteExperiment(std::move(labels), std::move(transforms));
}

}  // namespace qmlab::test
