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
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qmlab/cpmap.hpp"
#include "qmlab/mc.hpp"
#include "qmlab/parallel.hpp"
#include "qmlab/qstate.hpp"

namespace qmlab {

//=========================================================================
// Measurement model
//
// An experiment is a finite outcome set together with one state
// transformation per outcome. Over the full outcome set the family must be
// additive, trace-reducing per outcome, and trace-preserving in total; the
// probability of an outcome set A for input w is tr(T(A) w) / tr(w), and the
// selective post-state is T(A) w renormalized. General event algebras are
// represented only as partitions of the outcome set (coarse-graining);
// continuous outcome manifolds are handled by ContinuousExperiment below.
//=========================================================================

/// One outcome's state transformation, held either as Kraus operators or as
/// a Choi matrix. The Choi representation admits non-CP data on purpose:
/// validate() reports such defects instead of refusing to represent them.
class Transform {
 public:
  explicit Transform(KrausSet k) : rep_(std::move(k)) {
    effect_ = std::get<KrausSet>(rep_).total_effect();
  }

  explicit Transform(ChoiMatrix c) : rep_(std::move(c)) {
    // tr map(w) = tr(A w) with A the transpose of the Choi matrix's
    // partial trace over the output clump
    const auto& choi = std::get<ChoiMatrix>(rep_);
    const Eigen::Index n = choi.dim;
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      d += choi.m.block(a * n, a * n, n, n);
    effect_ = d.transpose();
  }

  Eigen::Index dim() const {
    return std::holds_alternative<KrausSet>(rep_)
               ? std::get<KrausSet>(rep_).dim
               : std::get<ChoiMatrix>(rep_).dim;
  }

  bool has_kraus() const { return std::holds_alternative<KrausSet>(rep_); }
  const KrausSet& kraus() const { return std::get<KrausSet>(rep_); }

  ChoiMatrix choi() const {
    if (has_kraus()) return choi_from_kraus(std::get<KrausSet>(rep_));
    return std::get<ChoiMatrix>(rep_);
  }

  ComplexMatrix apply(const ComplexMatrix& w) const {
    return has_kraus() ? apply_map(std::get<KrausSet>(rep_), w)
                       : apply_map(std::get<ChoiMatrix>(rep_), w);
  }

  // tr T(w) without forming the full output.
  double trace_of_applied(const ComplexMatrix& w) const {
    return (effect_ * w).trace().real();
  }

  // A with tr T(w) = tr(A w); equals sum K†K in the Kraus representation.
  const ComplexMatrix& effect() const { return effect_; }

  // Union of two transforms (additivity of the measure over disjoint sets).
  static Transform merged(const Transform& a, const Transform& b) {
    if (a.dim() != b.dim()) throw DimMismatch("Transform::merged: dims differ");
    if (a.has_kraus() && b.has_kraus()) {
      std::vector<ComplexMatrix> ops = a.kraus().ops;
      const auto& more = b.kraus().ops;
      ops.insert(ops.end(), more.begin(), more.end());
      return Transform(KrausSet{a.dim(), std::move(ops)});
    }
    const ChoiMatrix ca = a.choi();
    const ChoiMatrix cb = b.choi();
    return Transform(ChoiMatrix{ca.dim, ca.m + cb.m});
  }

 private:
  std::variant<KrausSet, ChoiMatrix> rep_;
  ComplexMatrix effect_;
};

class DiscreteExperiment {
 public:
  DiscreteExperiment(std::vector<std::string> labels,
                     std::vector<Transform> transforms)
      : labels_(std::move(labels)), transforms_(std::move(transforms)) {
    if (labels_.empty() || labels_.size() != transforms_.size()) {
      throw BadArgument(
          "DiscreteExperiment: need one transform per outcome label");
    }
    const Eigen::Index n = transforms_.front().dim();
    for (const auto& t : transforms_) {
      if (t.dim() != n) {
        throw DimMismatch("DiscreteExperiment: transform dims differ");
      }
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second) {
        throw BadArgument("DiscreteExperiment: duplicate label " + labels_[i]);
      }
    }
  }

  // Projective (Lüders) measurement: one single-operator transform per
  // projector. With orthogonal projectors summing to I this satisfies all
  // four measure conditions.
  static DiscreteExperiment projective(
      const std::vector<ComplexMatrix>& projectors,
      std::vector<std::string> labels = {}) {
    if (labels.empty()) {
      for (std::size_t i = 0; i < projectors.size(); ++i)
        labels.push_back(std::to_string(i));
    }
    std::vector<Transform> transforms;
    transforms.reserve(projectors.size());
    for (const auto& p : projectors) {
      transforms.emplace_back(KrausSet::make({p}));
    }
    return DiscreteExperiment(std::move(labels), std::move(transforms));
  }

  std::size_t n_outcomes() const { return labels_.size(); }
  Eigen::Index dim() const { return transforms_.front().dim(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Transform>& transforms() const { return transforms_; }
  const Transform& transform(std::size_t i) const { return transforms_.at(i); }

  std::size_t index_of(const std::string& label) const {
    const auto it = index_.find(label);
    if (it == index_.end()) {
      throw UnknownLabel("DiscreteExperiment: unknown outcome " + label);
    }
    return it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Transform> transforms_;
  std::map<std::string, std::size_t> index_;
};

/// A recorded measurement outcome: the outcome itself, the normalized
/// post-measurement state, the probability (density) of the outcome, and
/// the trial metadata needed to reproduce it.
template <class Outcome>
struct Sample {
  Outcome outcome;
  DensityMatrix post_state;
  double probability_density = 0.0;
  std::uint64_t trial_index = 0;
  std::uint64_t seed = 0;
};

using DiscreteSample = Sample<std::string>;

//=========================================================================
// Operations on discrete experiments
//=========================================================================

// Probability that the outcome lies in `subset`; additive over disjoint
// subsets by construction. Duplicated labels are counted once.
inline double outcome_probability(const DiscreteExperiment& exp,
                                  const DensityMatrix& w,
                                  std::span<const std::string> subset) {
  if (w.dim() != exp.dim()) {
    throw DimMismatch("outcome_probability: state dimension mismatch");
  }
  std::set<std::size_t> indices;
  for (const auto& label : subset) indices.insert(exp.index_of(label));
  double p = 0.0;
  for (const std::size_t i : indices) {
    p += exp.transform(i).trace_of_applied(w.matrix());
  }
  return p;
}

inline double outcome_probability(const DiscreteExperiment& exp,
                                  const DensityMatrix& w,
                                  std::initializer_list<std::string> subset) {
  const std::vector<std::string> v(subset);
  return outcome_probability(exp, w, std::span<const std::string>(v));
}

// Normalized selective post-state for one outcome. The outcome must have
// probability above tol::prob; the conditional state is undefined at zero
// probability, so this errors rather than inventing one.
inline DensityMatrix posterior_state(const DiscreteExperiment& exp,
                                     const DensityMatrix& w,
                                     const std::string& outcome,
                                     double min_probability = tol::prob) {
  if (w.dim() != exp.dim()) {
    throw DimMismatch("posterior_state: state dimension mismatch");
  }
  const auto& t = exp.transform(exp.index_of(outcome));
  const ComplexMatrix mapped = t.apply(w.matrix());
  const double p = mapped.trace().real();
  if (p <= min_probability) {
    std::ostringstream os;
    os << "posterior_state: outcome " << outcome << " has probability " << p;
    throw ZeroProbabilityOutcome(os.str());
  }
  return DensityMatrix::make(mapped / p, 1e-8);
}

// Merge outcomes along a partition (disjoint label sets covering every
// outcome). Block probabilities equal the sums over their members exactly.
inline DiscreteExperiment coarse_grain(
    const DiscreteExperiment& exp,
    const std::vector<std::vector<std::string>>& partition) {
  std::set<std::size_t> seen;
  std::vector<std::string> labels;
  std::vector<Transform> transforms;
  for (const auto& block : partition) {
    if (block.empty()) throw BadPartition("coarse_grain: empty block");
    std::string label;
    std::optional<Transform> merged;
    for (const auto& member : block) {
      const std::size_t i = exp.index_of(member);
      if (!seen.insert(i).second) {
        throw BadPartition("coarse_grain: outcome " + member +
                           " appears twice");
      }
      label += label.empty() ? member : "+" + member;
      merged = merged ? Transform::merged(*merged, exp.transform(i))
                      : exp.transform(i);
    }
    labels.push_back(std::move(label));
    transforms.push_back(std::move(*merged));
  }
  if (seen.size() != exp.n_outcomes()) {
    throw BadPartition("coarse_grain: partition does not cover all outcomes");
  }
  return DiscreteExperiment(std::move(labels), std::move(transforms));
}

// Draws one outcome by inverse CDF over the outcome probabilities and
// returns it with its normalized post-state. Probabilities are renormalized
// by their total, so lossy experiments sample conditionally on an outcome
// being recorded.
inline DiscreteSample sample_discrete(const DiscreteExperiment& exp,
                                      const DensityMatrix& w,
                                      RandomStream& rng) {
  if (w.dim() != exp.dim()) {
    throw DimMismatch("sample_discrete: state dimension mismatch");
  }
  std::vector<double> probs(exp.n_outcomes());
  double total = 0.0;
  for (std::size_t i = 0; i < exp.n_outcomes(); ++i) {
    probs[i] = std::max(0.0, exp.transform(i).trace_of_applied(w.matrix()));
    total += probs[i];
  }
  if (total <= tol::prob) {
    throw ZeroProbabilityOutcome("sample_discrete: total probability is zero");
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  std::size_t pick = exp.n_outcomes();
  for (std::size_t i = 0; i < exp.n_outcomes(); ++i) {
    if (probs[i] <= 0.0) continue;
    cum += probs[i];
    pick = i;
    if (u < cum) break;
  }
  if (pick == exp.n_outcomes()) {
    throw ZeroProbabilityOutcome("sample_discrete: no selectable outcome");
  }
  DiscreteSample s{exp.labels()[pick],
                   posterior_state(exp, w, exp.labels()[pick]), probs[pick], 0,
                   0};
  return s;
}

//=========================================================================
// Validation of the measure conditions
//=========================================================================

struct ExperimentValidation {
  enum class Kind {
    NotCompletelyPositive,  // a transform's Choi matrix has a negative eigenvalue
    NotTraceReducing,       // tr T(w) > 1 for some probe state
    TotalProbability,       // sum_i tr T_i(w) != 1 for some probe state
  };
  struct Violation {
    Kind kind;
    std::ptrdiff_t outcome;  // -1 for whole-experiment violations
    double value;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks the four conditions on the transformation family: complete
// positivity per transform (Choi spectrum), trace reduction per transform on
// random full-rank probes, and total probability one on the same probes.
// Additivity holds by construction for this representation.
inline ExperimentValidation validate(const DiscreteExperiment& exp,
                                     int probe_states, RandomStream& rng,
                                     double tolerance = 1e-9) {
  if (probe_states < 1) {
    throw BadArgument("validate: need at least one probe state");
  }
  ExperimentValidation report;
  for (std::size_t i = 0; i < exp.n_outcomes(); ++i) {
    const double min_eig =
        hermitian_eigenvalues(exp.transform(i).choi().m).minCoeff();
    if (min_eig < -tol::psd) {
      report.violations.push_back(
          {ExperimentValidation::Kind::NotCompletelyPositive,
           static_cast<std::ptrdiff_t>(i), min_eig});
    }
  }
  for (int probe = 0; probe < probe_states; ++probe) {
    const auto w = random_density(exp.dim(), exp.dim(), rng);
    double total = 0.0;
    for (std::size_t i = 0; i < exp.n_outcomes(); ++i) {
      const double ratio = exp.transform(i).trace_of_applied(w.matrix());
      total += ratio;
      if (ratio > 1.0 + tolerance) {
        report.violations.push_back(
            {ExperimentValidation::Kind::NotTraceReducing,
             static_cast<std::ptrdiff_t>(i), ratio});
      }
    }
    if (std::abs(total - 1.0) > tolerance) {
      report.violations.push_back(
          {ExperimentValidation::Kind::TotalProbability, -1, total});
    }
  }
  return report;
}

//=========================================================================
// Continuous experiments
//=========================================================================

/// An experiment whose outcome space is a manifold carrying a base
/// probability measure. sample_base draws from the base measure;
/// transform_density evaluates the transformation density at an outcome
/// point (rank one for every model in this library). The probability
/// density of an outcome for input w is tr(t(ω) applied to w).
template <class Point>
struct ContinuousExperiment {
  std::function<Point(RandomStream&)> sample_base;
  std::function<KrausSet(const Point&)> transform_density;
};

template <class Point>
double probability_density(const ContinuousExperiment<Point>& exp,
                           const DensityMatrix& w, const Point& p) {
  double out = 0.0;
  for (const auto& k : exp.transform_density(p).ops) {
    out += (k * w.matrix() * k.adjoint()).trace().real();
  }
  return out;
}

template <class Point>
DensityMatrix posterior_state(const ContinuousExperiment<Point>& exp,
                              const DensityMatrix& w, const Point& p) {
  const ComplexMatrix mapped =
      apply_map(exp.transform_density(p), w.matrix());
  const double tr = mapped.trace().real();
  if (tr <= tol::prob) {
    throw ZeroProbabilityOutcome(
        "posterior_state: zero transformation density at this outcome");
  }
  return DensityMatrix::make(mapped / tr, 1e-8);
}

// Monte Carlo estimate of the total probability (the density integrated
// against the base measure); 1 within statistical error for a valid
// experiment and any input state.
template <class Point>
McScalar total_probability(const ContinuousExperiment<Point>& exp,
                           const DensityMatrix& w, std::size_t n_samples,
                           std::uint64_t seed, int threads = 1) {
  if (n_samples < 2) throw BadArgument("total_probability: need n >= 2");
  std::vector<double> sums(block_count(n_samples), 0.0);
  std::vector<double> sq(block_count(n_samples), 0.0);
  for_each_block(n_samples, threads,
                 [&](std::size_t b, std::size_t first, std::size_t last) {
                   double s = 0.0, s2 = 0.0;
                   for (std::size_t i = first; i < last; ++i) {
                     RandomStream rng = RandomStream::substream(seed, i);
                     const Point p = exp.sample_base(rng);
                     const double d = probability_density(exp, w, p);
                     s += d;
                     s2 += d * d;
                   }
                   sums[b] = s;
                   sq[b] = s2;
                 });
  KahanSum total, total_sq;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    total.add(sums[b]);
    total_sq.add(sq[b]);
  }
  return mc_from_totals(total.value(), total_sq.value(), n_samples);
}

}  // namespace qmlab
