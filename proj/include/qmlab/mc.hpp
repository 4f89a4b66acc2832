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
#include <cstddef>
#include <limits>

#include "qmlab/errors.hpp"

namespace qmlab {

/// Monte Carlo estimate of a scalar quantity: sample mean and standard error.
struct McScalar {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

/// Monte Carlo estimate of a complex-matrix quantity. std_error holds the
/// componentwise standard error of |f - E f|.
struct McMatrix {
  Eigen::MatrixXcd value;
  Eigen::MatrixXd std_error;
  std::size_t n_samples = 0;
};

// Mean / SE from running totals. sum_sq is the sum of squared magnitudes.
inline McScalar mc_from_totals(double sum, double sum_sq, std::size_t n) {
  if (n < 2) throw BadArgument("mc_from_totals: need at least 2 samples");
  McScalar out;
  out.n_samples = n;
  out.value = sum / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  double var = (sum_sq / nn - out.value * out.value) * nn / (nn - 1.0);
  if (var < 0.0) var = 0.0;  // roundoff
  out.std_error = std::sqrt(var / nn);
  return out;
}

inline McMatrix mc_from_totals(const Eigen::MatrixXcd& sum,
                               const Eigen::MatrixXd& sum_sq, std::size_t n) {
  if (n < 2) throw BadArgument("mc_from_totals: need at least 2 samples");
  McMatrix out;
  out.n_samples = n;
  const double nn = static_cast<double>(n);
  out.value = sum / nn;
  Eigen::MatrixXd var =
      (sum_sq / nn - out.value.cwiseAbs2()) * nn / (nn - 1.0);
  out.std_error = var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(nn);
  return out;
}

/// Componentwise comparison of a Monte Carlo estimate against a closed-form
/// target, reporting the worst deviation both in absolute terms and in
/// standard-error units.
struct DeviationReport {
  double max_abs_deviation = 0.0;
  double max_se_units = 0.0;
  Eigen::Index worst_row = 0;
  Eigen::Index worst_col = 0;
  std::size_t n_samples = 0;
};

// A component with zero standard error must match exactly (within 1e-12);
// otherwise its deviation is reported as infinite.
inline DeviationReport compare_estimate(const McMatrix& estimate,
                                        const Eigen::MatrixXcd& expected) {
  if (estimate.value.rows() != expected.rows() ||
      estimate.value.cols() != expected.cols()) {
    throw DimMismatch("compare_estimate: shape mismatch");
  }
  DeviationReport report;
  report.n_samples = estimate.n_samples;
  for (Eigen::Index r = 0; r < expected.rows(); ++r) {
    for (Eigen::Index c = 0; c < expected.cols(); ++c) {
      const double dev = std::abs(estimate.value(r, c) - expected(r, c));
      const double se = estimate.std_error(r, c);
      double units;
      if (se > 0.0) {
        units = dev / se;
      } else {
        units = dev <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      if (units > report.max_se_units) {
        report.max_se_units = units;
        report.worst_row = r;
        report.worst_col = c;
      }
      report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
    }
  }
  return report;
}

}  // namespace qmlab
