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

#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qmlab/disentangle.hpp"
#include "qmlab/experiment.hpp"
#include "qmlab/qstate.hpp"

namespace qmlab {

using Json = nlohmann::json;

//=========================================================================
// Wire formats
//
// Complex matrices are stored row-major as nested arrays of [re, im] pairs;
// a state file is { "dim": n, "matrix": ... } and a map file is
// { "dim": n, "kraus": [matrix...] } or { "dim": n, "choi": matrix }.
// Doubles are emitted at full precision (values round-trip exactly).
//=========================================================================

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("matrix: expected a non-empty array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("matrix: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& entry = row.at(static_cast<std::size_t>(c));
      if (!entry.is_array() || entry.size() != 2 ||
          !entry.at(0).is_number() || !entry.at(1).is_number()) {
        throw ParseError("matrix: entries must be [re, im] pairs");
      }
      m(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

inline Json state_to_json(const DensityMatrix& rho) {
  return Json{{"dim", rho.dim()}, {"matrix", matrix_to_json(rho.matrix())}};
}

// Parses and validates a state file; structural problems raise ParseError,
// violated state invariants raise the matching validation error.
inline DensityMatrix state_from_json(const Json& j,
                                     double tolerance = tol::herm) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("matrix")) {
    throw ParseError("state: expected { dim, matrix }");
  }
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  const ComplexMatrix m = matrix_from_json(j.at("matrix"));
  if (m.rows() != dim || m.cols() != dim) {
    throw ParseError("state: matrix shape does not match dim");
  }
  return DensityMatrix::make(m, tolerance);
}

inline Json map_to_json(const KrausSet& k) {
  Json ops = Json::array();
  for (const auto& op : k.ops) ops.push_back(matrix_to_json(op));
  return Json{{"dim", k.dim}, {"kraus", std::move(ops)}};
}

inline Json map_to_json(const ChoiMatrix& c) {
  return Json{{"dim", c.dim}, {"choi", matrix_to_json(c.m)}};
}

using MapData = std::variant<KrausSet, ChoiMatrix>;

inline MapData map_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim")) {
    throw ParseError("map: expected { dim, kraus | choi }");
  }
  const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
  if (dim < 1) throw ParseError("map: dim must be >= 1");
  if (j.contains("kraus")) {
    const Json& ops = j.at("kraus");
    if (!ops.is_array() || ops.empty()) {
      throw ParseError("map: kraus must be a non-empty array");
    }
    std::vector<ComplexMatrix> kraus;
    for (const auto& op : ops) {
      ComplexMatrix m = matrix_from_json(op);
      if (m.rows() != dim || m.cols() != dim) {
        throw ParseError("map: kraus operator shape does not match dim");
      }
      kraus.push_back(std::move(m));
    }
    return KrausSet::make(std::move(kraus));
  }
  if (j.contains("choi")) {
    const ComplexMatrix m = matrix_from_json(j.at("choi"));
    if (m.rows() != dim * dim || m.cols() != dim * dim) {
      throw ParseError("map: choi matrix must be dim² x dim²");
    }
    try {
      return ChoiMatrix::make(dim, m);
    } catch (const NotHermitian&) {
      throw ParseError("map: choi matrix is not Hermitian");
    }
  }
  throw ParseError("map: need a kraus or choi field");
}

inline Json experiment_to_json(const DiscreteExperiment& exp) {
  Json transforms = Json::array();
  for (const auto& t : exp.transforms()) {
    transforms.push_back(t.has_kraus() ? map_to_json(t.kraus())
                                       : map_to_json(t.choi()));
  }
  return Json{{"outcomes", exp.labels()}, {"transforms", std::move(transforms)}};
}

inline DiscreteExperiment experiment_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("outcomes") || !j.contains("transforms")) {
    throw ParseError("experiment: expected { outcomes, transforms }");
  }
  std::vector<std::string> labels;
  for (const auto& label : j.at("outcomes")) {
    if (!label.is_string()) throw ParseError("experiment: labels must be strings");
    labels.push_back(label.get<std::string>());
  }
  std::vector<Transform> transforms;
  for (const auto& tj : j.at("transforms")) {
    MapData data = map_from_json(tj);
    if (std::holds_alternative<KrausSet>(data)) {
      transforms.emplace_back(std::get<KrausSet>(std::move(data)));
    } else {
      transforms.emplace_back(std::get<ChoiMatrix>(std::move(data)));
    }
  }
  if (labels.size() != transforms.size()) {
    throw ParseError("experiment: outcomes/transforms length mismatch");
  }
  return DiscreteExperiment(std::move(labels), std::move(transforms));
}

inline Json validation_to_json(const ExperimentValidation& report,
                               const std::vector<std::string>& labels) {
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    const char* kind = nullptr;
    switch (v.kind) {
      case ExperimentValidation::Kind::NotCompletelyPositive:
        kind = "not_completely_positive";
        break;
      case ExperimentValidation::Kind::NotTraceReducing:
        kind = "not_trace_reducing";
        break;
      case ExperimentValidation::Kind::TotalProbability:
        kind = "total_probability";
        break;
    }
    Json entry{{"kind", kind}, {"value", v.value}};
    entry["outcome"] =
        v.outcome >= 0 &&
                v.outcome < static_cast<std::ptrdiff_t>(labels.size())
            ? Json(labels[static_cast<std::size_t>(v.outcome)])
            : Json(nullptr);
    violations.push_back(std::move(entry));
  }
  return Json{{"ok", report.ok()}, {"violations", std::move(violations)}};
}

//=========================================================================
// File helpers and sample dumps
//=========================================================================

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

namespace detail {
inline void csv_vector(std::ostream& os, const ComplexVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << ',' << v(i).real() << ',' << v(i).imag();
  }
}
}  // namespace detail

// One row per sample: trial index, representative-vector components
// (re, im interleaved), then the density value.
inline void write_samples_csv(std::ostream& os,
                              std::span<const Sample<PureState>> samples) {
  os.precision(17);
  for (const auto& s : samples) {
    os << s.trial_index;
    detail::csv_vector(os, s.outcome.vector());
    os << ',' << s.probability_density << '\n';
  }
}

// Product outcomes list every factor's components in factor order.
inline void write_samples_csv(std::ostream& os,
                              std::span<const Sample<ProductPoint>> samples) {
  os.precision(17);
  for (const auto& s : samples) {
    os << s.trial_index;
    for (const auto& factor : s.outcome.factors) {
      detail::csv_vector(os, factor.vector());
    }
    os << ',' << s.probability_density << '\n';
  }
}

}  // namespace qmlab
