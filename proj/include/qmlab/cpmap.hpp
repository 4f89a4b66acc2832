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

#include <Eigen/Dense>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "qmlab/qstate.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

//=========================================================================
// Map representations
//=========================================================================

/// A map in Kraus form: rho -> sum_i K(i) rho K(i)†. Only square
/// (dimension-preserving) maps are supported. Any Kraus set is completely
/// positive by construction.
struct KrausSet {
  Eigen::Index dim = 0;
  std::vector<ComplexMatrix> ops;

  static KrausSet make(std::vector<ComplexMatrix> operators) {
    if (operators.empty()) {
      throw BadArgument("KrausSet: need at least one operator");
    }
    const Eigen::Index n = operators.front().rows();
    for (const auto& k : operators) {
      if (k.rows() != n || k.cols() != n) {
        throw DimMismatch("KrausSet: all operators must be n x n");
      }
    }
    return KrausSet{n, std::move(operators)};
  }

  // sum_i K(i)† K(i); tr(map(rho)) = tr(total_effect * rho).
  ComplexMatrix total_effect() const {
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (const auto& k : ops) s += k.adjoint() * k;
    return s;
  }

  bool is_trace_reducing(double tolerance = tol::psd) const {
    return hermitian_eigenvalues(total_effect()).maxCoeff() <= 1.0 + tolerance;
  }
};

/// A map encoded by its action on matrix units: C = sum_ij map(E_ij) x E_ij,
/// unnormalized, stored as an n² x n² matrix with clumped indices
/// (out_row, in_row) x (out_col, in_col). The map is completely positive
/// iff C is positive semidefinite.
struct ChoiMatrix {
  Eigen::Index dim = 0;  // system dimension n; matrix is n² x n²
  ComplexMatrix m;

  static ChoiMatrix make(Eigen::Index dim, const ComplexMatrix& matrix,
                         double tolerance = tol::herm) {
    if (dim < 1 || matrix.rows() != dim * dim || matrix.cols() != dim * dim) {
      throw DimMismatch("ChoiMatrix: matrix must be dim² x dim²");
    }
    const double asym = hermiticity_residual(matrix);
    if (asym > tolerance) {
      std::ostringstream os;
      os << "ChoiMatrix: asymmetry " << asym << " exceeds " << tolerance;
      throw NotHermitian(os.str());
    }
    return ChoiMatrix{dim, 0.5 * (matrix + matrix.adjoint().eval())};
  }
};

namespace detail {

// Row-major vectorization: v(a*n + i) = k(a, i).
inline ComplexVector vec_row_major(const ComplexMatrix& k) {
  const Eigen::Index n = k.rows();
  ComplexVector v(n * k.cols());
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index i = 0; i < k.cols(); ++i) v(a * k.cols() + i) = k(a, i);
  return v;
}

inline ComplexMatrix unvec_row_major(const ComplexVector& v, Eigen::Index n) {
  ComplexMatrix k(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index i = 0; i < n; ++i) k(a, i) = v(a * n + i);
  return k;
}

}  // namespace detail

//=========================================================================
// Conversions and application
//=========================================================================

// C = sum_i vec(K_i) vec(K_i)† in the row-major vectorization, which equals
// sum_ij map(E_ij) x E_ij.
inline ChoiMatrix choi_from_kraus(const KrausSet& k) {
  const Eigen::Index n = k.dim;
  ComplexMatrix c = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& op : k.ops) {
    const ComplexVector v = detail::vec_row_major(op);
    c += v * v.adjoint();
  }
  return ChoiMatrix{n, std::move(c)};
}

// Eigendecomposition of the Choi matrix; eigenpairs with eigenvalue above
// tol::kraus_rank (relative to the largest) become Kraus operators
// sqrt(lambda) * unvec(v). Throws NotCompletelyPositive when an eigenvalue
// falls below -tolerance.
inline KrausSet kraus_from_choi(const ChoiMatrix& c,
                                double tolerance = tol::psd) {
  const Eigen::Index n = c.dim;
  const auto s = eig_hermitian(c.m);
  const double min_eig = s.eigenvalues.minCoeff();
  if (min_eig < -tolerance) {
    std::ostringstream os;
    os << "kraus_from_choi: Choi eigenvalue " << min_eig
       << " is negative; the map is not completely positive";
    throw NotCompletelyPositive(os.str(), min_eig);
  }
  const double max_eig = s.eigenvalues.maxCoeff();
  const double cut = std::max(tolerance, tol::kraus_rank * std::max(max_eig, 0.0));
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double lambda = s.eigenvalues(i);
    if (lambda <= cut) continue;
    ops.push_back(std::sqrt(lambda) *
                  detail::unvec_row_major(s.eigenvectors.col(i), n));
  }
  if (ops.empty()) ops.push_back(ComplexMatrix::Zero(n, n));  // zero map
  return KrausSet{n, std::move(ops)};
}

inline ComplexMatrix apply_map(const KrausSet& k, const ComplexMatrix& rho) {
  if (rho.rows() != k.dim || rho.cols() != k.dim) {
    throw DimMismatch("apply_map: state dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(k.dim, k.dim);
  for (const auto& op : k.ops) out += op * rho * op.adjoint();
  return 0.5 * (out + out.adjoint().eval());
}

// out(a,b) = sum_ij C((a,i),(b,j)) rho(i,j).
inline ComplexMatrix apply_map(const ChoiMatrix& c, const ComplexMatrix& rho) {
  const Eigen::Index n = c.dim;
  if (rho.rows() != n || rho.cols() != n) {
    throw DimMismatch("apply_map: state dimension mismatch");
  }
  ComplexMatrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      out(a, b) = c.m.block(a * n, b * n, n, n).cwiseProduct(rho).sum();
    }
  }
  return 0.5 * (out + out.adjoint().eval());
}

inline HermitianOperator apply_map(const KrausSet& k, const DensityMatrix& rho) {
  return HermitianOperator::make(apply_map(k, rho.matrix()), 1e-8);
}

inline HermitianOperator apply_map(const ChoiMatrix& c, const DensityMatrix& rho) {
  return HermitianOperator::make(apply_map(c, rho.matrix()), 1e-8);
}

//=========================================================================
// Trace conditions and positivity certification
//=========================================================================

struct TraceCondition {
  bool trace_reducing = false;   // sum K†K <= I
  bool trace_preserving = false; // sum K†K == I
  double max_eigenvalue = 0.0;
};

inline TraceCondition check_trace_condition(const KrausSet& k,
                                            double tolerance = tol::psd) {
  const RealVector evals = hermitian_eigenvalues(k.total_effect());
  TraceCondition out;
  out.max_eigenvalue = evals.maxCoeff();
  out.trace_reducing = out.max_eigenvalue <= 1.0 + tolerance;
  out.trace_preserving = (evals.array() - 1.0).abs().maxCoeff() <= tolerance;
  return out;
}

// Value of the positivity form <X| map(|Y><Y|) |X> = (X x conj(Y))† C (X x conj(Y)).
// The map is positive iff this is nonnegative for all X, Y; it is completely
// positive iff C itself is positive semidefinite.
inline double biquadratic_form(const ChoiMatrix& c, const ComplexVector& x,
                               const ComplexVector& y) {
  if (x.size() != c.dim || y.size() != c.dim) {
    throw DimMismatch("biquadratic_form: vector dimension mismatch");
  }
  const ComplexVector w = tensor_product(x, y.conjugate().eval());
  return (w.adjoint() * c.m * w)(0, 0).real();
}

inline double biquadratic_form(const ChoiMatrix& c, const PureState& x,
                               const PureState& y) {
  return biquadratic_form(c, x.vector(), y.vector());
}

enum class MapPositivity {
  CompletelyPositive,   // Choi PSD: exact certificate
  PositiveCandidate,    // no violation found; heuristic, not a certificate
  NotPositive,          // witness found with negative form value
};

struct PositivityVerdict {
  MapPositivity kind = MapPositivity::PositiveCandidate;
  double min_choi_eigenvalue = 0.0;
  std::optional<std::pair<PureState, PureState>> witness;
  double witness_value = 0.0;
};

/// Classifies a map by its Choi matrix. PSD Choi certifies complete
/// positivity exactly. Otherwise the positivity form is searched over random
/// (X, Y) pairs; each trial is refined by alternating eigenvector descent
/// (the form is a Hermitian quadratic in X for fixed Y and vice versa, so
/// each half-step is an exact minimization). A negative value yields a
/// NotPositive verdict with the witness attached; finding none yields
/// PositiveCandidate, which is explicitly non-certifying.
inline PositivityVerdict certify_positive(const ChoiMatrix& c, int trials,
                                          RandomStream& rng,
                                          int refine_steps = 10) {
  if (trials < 1) throw BadArgument("certify_positive: trials must be >= 1");
  const Eigen::Index n = c.dim;
  PositivityVerdict verdict;
  verdict.min_choi_eigenvalue = hermitian_eigenvalues(c.m).minCoeff();
  if (verdict.min_choi_eigenvalue >= -tol::psd) {
    verdict.kind = MapPositivity::CompletelyPositive;
    return verdict;
  }

  const std::uint64_t search_seed = rng.bits();
  double best = 0.0;
  ComplexVector best_x, best_y;
  for (int t = 0; t < trials; ++t) {
    RandomStream trial_rng =
        RandomStream::substream(search_seed, static_cast<std::uint64_t>(t));
    ComplexVector x = trial_rng.gaussian_vector(n).normalized();
    ComplexVector y = trial_rng.gaussian_vector(n).normalized();
    for (int step = 0; step < refine_steps; ++step) {
      // minimize over X: form = X† M_Y X with M_Y(a,b) = sum_ij C((a,i),(b,j)) Y_i conj(Y_j)
      ComplexMatrix my(n, n);
      const ComplexMatrix yy = y * y.adjoint();
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          my(a, b) = c.m.block(a * n, b * n, n, n).cwiseProduct(yy).sum();
      auto sx = eig_hermitian(ComplexMatrix(0.5 * (my + my.adjoint().eval())));
      x = sx.eigenvectors.col(0);
      // minimize over Y: form = v† N_X v with v = conj(Y),
      // N_X(i,j) = sum_ab conj(X_a) C((a,i),(b,j)) X_b
      ComplexMatrix nx = ComplexMatrix::Zero(n, n);
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
          nx += std::conj(x(a)) * x(b) * c.m.block(a * n, b * n, n, n);
      auto sy = eig_hermitian(ComplexMatrix(0.5 * (nx + nx.adjoint().eval())));
      y = sy.eigenvectors.col(0).conjugate();
    }
    const double value = biquadratic_form(c, x, y);
    if (value < best) {
      best = value;
      best_x = x;
      best_y = y;
    }
  }

  if (best < -tol::psd) {
    verdict.kind = MapPositivity::NotPositive;
    verdict.witness = std::make_pair(PureState::normalized(best_x),
                                     PureState::normalized(best_y));
    verdict.witness_value = best;
  }
  return verdict;
}

//=========================================================================
// Stock maps
//=========================================================================

inline KrausSet identity_map(Eigen::Index n) {
  return KrausSet{n, {ComplexMatrix::Identity(n, n)}};
}

// Choi matrix of the transpose map: map(E_ij) = E_ji gives the factor swap.
inline ChoiMatrix transpose_map_choi(Eigen::Index n) {
  return ChoiMatrix{n, swap_matrix(n)};
}

// Fully depolarizing qubit channel: Kraus set {I, X, Y, Z} / 2.
inline KrausSet depolarizing_qubit() {
  ComplexMatrix i = ComplexMatrix::Identity(2, 2);
  ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  z << 1, 0, 0, -1;
  return KrausSet{2, {0.5 * i, 0.5 * x, 0.5 * y, 0.5 * z}};
}

}  // namespace qmlab
