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
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "qmlab/errors.hpp"
#include "qmlab/rng.hpp"

namespace qmlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Default tolerances, sized for double-precision spectral routines on
// dimensions up to ~64.
namespace tol {
inline constexpr double herm = 1e-9;
inline constexpr double psd = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double norm = 1e-9;
inline constexpr double recon = 1e-10;
inline constexpr double prob = 1e-12;
inline constexpr double kraus_rank = 1e-12;  // relative to largest Choi eigenvalue
}  // namespace tol

// max |entry| of M - M†.
inline double hermiticity_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

//=========================================================================
// Domain types
//=========================================================================

/// Validated Hermitian operator. Construction symmetrizes (M + M†)/2 once
/// the asymmetry is verified to be below tolerance.
class HermitianOperator {
 public:
  static HermitianOperator make(const ComplexMatrix& m,
                                double tolerance = tol::herm) {
    if (m.rows() != m.cols()) {
      throw DimMismatch("HermitianOperator: matrix must be square");
    }
    const double residual = hermiticity_residual(m);
    if (residual > tolerance) {
      std::ostringstream os;
      os << "HermitianOperator: asymmetry " << residual << " exceeds "
         << tolerance;
      throw NotHermitian(os.str());
    }
    return HermitianOperator(0.5 * (m + m.adjoint().eval()));
  }

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  explicit HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Unit-norm state vector, understood projectively: two PureStates are the
/// same ray iff their vectors agree up to a unit-modulus scalar.
class PureState {
 public:
  // Validates that v is already unit norm (within tolerance), then rescales
  // exactly to unit norm.
  static PureState make(const ComplexVector& v, double tolerance = tol::norm) {
    const double n = v.norm();
    if (std::abs(n - 1.0) > tolerance) {
      std::ostringstream os;
      os << "PureState: norm " << n << " is not 1 within " << tolerance;
      throw BadNorm(os.str());
    }
    return PureState(v / n);
  }

  // Normalizes an arbitrary nonzero vector.
  static PureState normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw BadNorm("PureState: cannot normalize zero or non-finite vector");
    }
    return PureState(v / n);
  }

  static PureState basis(Eigen::Index n, Eigen::Index k) {
    if (n < 1 || k < 0 || k >= n) throw BadArgument("PureState::basis: bad index");
    ComplexVector v = ComplexVector::Zero(n);
    v(k) = 1.0;
    return PureState(std::move(v));
  }

  const ComplexVector& vector() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }

  ComplexMatrix projector() const { return v_ * v_.adjoint(); }

  // Same projective point: |<a|b>| = 1 for unit vectors.
  bool projectively_equal(const PureState& other, double tolerance = 1e-9) const {
    if (dim() != other.dim()) return false;
    return std::abs(std::abs(v_.dot(other.v_)) - 1.0) <= tolerance;
  }

 private:
  explicit PureState(ComplexVector v) : v_(std::move(v)) {}
  ComplexVector v_;
};

// The unique state orthogonal to a qubit state: (a, b) -> (conj(b), -conj(a)).
inline ComplexVector qubit_orthogonal(const ComplexVector& phi) {
  if (phi.size() != 2) throw DimMismatch("qubit_orthogonal: need dim 2");
  ComplexVector out(2);
  out(0) = std::conj(phi(1));
  out(1) = -std::conj(phi(0));
  return out;
}

/// Hermitian positive-semidefinite unit-trace operator.
class DensityMatrix {
 public:
  static DensityMatrix make(const ComplexMatrix& m, double tolerance = tol::herm);

  static DensityMatrix pure(const PureState& z) {
    return DensityMatrix(z.projector());
  }

  static DensityMatrix maximally_mixed(Eigen::Index n) {
    if (n < 1) throw BadArgument("maximally_mixed: dim must be >= 1");
    return DensityMatrix(ComplexMatrix::Identity(n, n) /
                         static_cast<double>(n));
  }

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  // tr(rho^2); 1 for pure states.
  double purity() const { return (m_ * m_).trace().real(); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

/// Eigensystem of a Hermitian operator: eigenvalues ascending, eigenvector
/// columns orthonormal. Within a degenerate cluster the eigenvectors are
/// only determined up to unitary mixing; compare spectral projectors, not
/// individual columns.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

//=========================================================================
// Operations
//=========================================================================

// Eigensolve trusting hermiticity of the input (only the lower triangle is
// read, which symmetrizes implicitly).
inline SpectralDecomposition eig_hermitian(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
  return eig_hermitian(h.matrix());
}

inline RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m,
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("hermitian_eigenvalues: no convergence");
  }
  return solver.eigenvalues();
}

inline DensityMatrix DensityMatrix::make(const ComplexMatrix& m,
                                         double tolerance) {
  if (m.rows() != m.cols()) {
    throw DimMismatch("DensityMatrix: matrix must be square");
  }
  const double asym = hermiticity_residual(m);
  if (asym > tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: asymmetry " << asym << " exceeds " << tolerance;
    throw NotHermitian(os.str());
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint().eval());
  const RealVector evals = hermitian_eigenvalues(h);
  if (evals.minCoeff() < -tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: eigenvalue " << evals.minCoeff() << " below -"
       << tolerance;
    throw NotPositive(os.str());
  }
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " is not 1 within " << tolerance;
    throw BadTrace(os.str());
  }
  return DensityMatrix(std::move(h));
}

inline DensityMatrix make_density(const ComplexMatrix& m,
                                  double tolerance = tol::herm) {
  return DensityMatrix::make(m, tolerance);
}

namespace detail {
// Flips the sign of a Hermitian matrix so that the first nonzero entry
// (row-major scan) has positive real part (or positive imaginary part when
// the real part vanishes). trace_distance(a, b) and trace_distance(b, a)
// then diagonalize the identical matrix and agree exactly.
inline void canonicalize_sign(ComplexMatrix& d) {
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.cols(); ++c) {
      const Complex v = d(r, c);
      if (v.real() != 0.0) {
        if (v.real() < 0.0) d = -d;
        return;
      }
      if (v.imag() != 0.0) {
        if (v.imag() < 0.0) d = -d;
        return;
      }
    }
  }
}
}  // namespace detail

// (1/2) sum |eigenvalues(a - b)| for Hermitian a, b.
inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimMismatch("trace_distance: dimension mismatch");
  }
  ComplexMatrix d = a - b;
  detail::canonicalize_sign(d);
  return 0.5 * hermitian_eigenvalues(d).cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

// Kronecker product, first factor major: out((i,k),(j,l)) = a(i,j) b(k,l)
// with clumped row index i*rows(b)+k. This is the one index convention used
// across the library for composite systems.
inline ComplexMatrix tensor_product(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexVector tensor_product(const ComplexVector& x,
                                    const ComplexVector& y) {
  ComplexVector out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out.segment(i * y.size(), y.size()) = x(i) * y;
  }
  return out;
}

// Permutation exchanging the two factors of an n x n composite:
// swap (x tensor y) = y tensor x.
inline ComplexMatrix swap_matrix(Eigen::Index n) {
  ComplexMatrix s = ComplexMatrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) s(i * n + j, j * n + i) = 1.0;
  }
  return s;
}

enum class Factor { First, Second };

// Reduced density matrix of one factor of a bipartite state.
inline DensityMatrix partial_trace(const DensityMatrix& rho, Eigen::Index d1,
                                   Eigen::Index d2, Factor keep) {
  if (rho.dim() != d1 * d2) {
    throw DimMismatch("partial_trace: dim(rho) != d1*d2");
  }
  const ComplexMatrix& m = rho.matrix();
  if (keep == Factor::First) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index j = 0; j < d1; ++j)
        for (Eigen::Index k = 0; k < d2; ++k)
          out(i, j) += m(i * d2 + k, j * d2 + k);
    return DensityMatrix::make(out);
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (Eigen::Index k = 0; k < d2; ++k)
    for (Eigen::Index l = 0; l < d2; ++l)
      for (Eigen::Index i = 0; i < d1; ++i)
        out(k, l) += m(i * d2 + k, i * d2 + l);
  return DensityMatrix::make(out);
}

// Random rank-r state: sum of r Gaussian outer products, normalized to unit
// trace. Deterministic given the stream state.
inline DensityMatrix random_density(Eigen::Index n, Eigen::Index rank,
                                    RandomStream& rng) {
  if (n < 1 || rank < 1 || rank > n) {
    throw BadArgument("random_density: need 1 <= rank <= n");
  }
  ComplexMatrix s = ComplexMatrix::Zero(n, n);
  double total = 0.0;
  for (Eigen::Index r = 0; r < rank; ++r) {
    const ComplexVector v = rng.gaussian_vector(n);
    s += v * v.adjoint();
    total += v.squaredNorm();
  }
  s /= total;
  s = 0.5 * (s + s.adjoint().eval());
  return DensityMatrix::make(s);
}

}  // namespace qmlab
