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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "qmlab/projective_sampling.hpp"
#include "testutil.hpp"

using namespace qmlab;
using qmlab::test::max_abs_diff;
using Catch::Approx;

TEST_CASE("CP^0 has a single point", "[fs]") {
  RandomStream rng(301);
  ComplexVector one(1);
  one << 1.0;
  const auto ref = PureState::make(one);
  for (int i = 0; i < 10; ++i) {
    REQUIRE(sample_fs_uniform(1, rng).projectively_equal(ref));
  }
}

TEST_CASE("uniform sampling pushes |Z1|² to the uniform law on [0,1]", "[fs]") {
  // for n = 2 the squared first component of a uniform ray is uniform
  RandomStream rng(303);
  const std::size_t n = 100000;
  std::vector<double> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back(std::norm(sample_fs_uniform(2, rng).vector()(0)));
  }
  REQUIRE(qmlab::test::ks_uniform_statistic(std::move(t)) <
          qmlab::test::ks_critical_1pct(n));
}

TEST_CASE("mean projector of uniform points is I/n", "[fs]") {
  const Eigen::Index n = 3;
  const auto est = mc_integrate_matrix(
      [](const PureState& x) { return x.projector(); }, n, 100000, 305);
  const auto report = compare_estimate(
      est, ComplexMatrix::Identity(n, n) / static_cast<double>(n));
  REQUIRE(report.max_se_units < 4.0);
}

TEST_CASE("density_rho closed-form values", "[fs]") {
  RandomStream rng(307);
  const auto mixed = DensityMatrix::maximally_mixed(3);
  for (int i = 0; i < 20; ++i) {
    REQUIRE(density_rho(mixed, sample_fs_uniform(3, rng)) ==
            Approx(1.0).margin(1e-12));
  }
  const auto e1 = PureState::basis(3, 0);
  const auto e2 = PureState::basis(3, 1);
  const auto pure = DensityMatrix::pure(e1);
  REQUIRE(density_rho(pure, e1) == Approx(3.0));
  REQUIRE(density_rho(pure, e2) == Approx(0.0).margin(1e-15));
  REQUIRE_THROWS_AS(density_rho(pure, PureState::basis(2, 0)), DimMismatch);
}

TEST_CASE("density_rho is unitarily covariant", "[fs]") {
  RandomStream rng(309);
  for (int rep = 0; rep < 20; ++rep) {
    const auto w = random_density(3, 2, rng);
    const auto x = sample_fs_uniform(3, rng);
    const ComplexMatrix u = qmlab::test::random_unitary(3, rng);
    const auto wu = DensityMatrix::make(u * w.matrix() * u.adjoint(), 1e-8);
    const auto xu = PureState::normalized(u * x.vector());
    REQUIRE(density_rho(wu, xu) == Approx(density_rho(w, x)).margin(1e-12));
  }
}

TEST_CASE("density_rho is bounded by n lambda_max", "[fs]") {
  RandomStream rng(311);
  const auto w = random_density(4, 4, rng);
  const double bound =
      4.0 * hermitian_eigenvalues(w.matrix()).maxCoeff() + 1e-12;
  for (int i = 0; i < 100; ++i) {
    REQUIRE(density_rho(w, sample_fs_uniform(4, rng)) <= bound);
  }
}

TEST_CASE("density_rho integrates to one", "[fs]") {
  RandomStream rng(313);
  for (Eigen::Index n : {2, 3, 4}) {
    const auto w = random_density(n, n, rng);
    const auto est = mc_integrate(
        [&](const PureState& x) { return density_rho(w, x); }, n, 50000, 315);
    REQUIRE(std::abs(est.value - 1.0) < 4.0 * est.std_error);
  }
}

TEST_CASE("sample_rho on the maximally mixed state is uniform", "[fs]") {
  // envelope n * (1/n) = 1: every proposal accepted, output exactly uniform
  const auto mixed = DensityMatrix::maximally_mixed(2);
  RhoSampler sampler(mixed);
  const std::size_t n = 50000;
  std::vector<double> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = RandomStream::substream(317, i);
    t.push_back(std::norm(sampler.draw(rng).vector()(0)));
  }
  REQUIRE(qmlab::test::ks_uniform_statistic(std::move(t)) <
          qmlab::test::ks_critical_1pct(n));
}

TEST_CASE("sample_rho against a pure state follows the 2t density", "[fs]") {
  // for w = |e1><e1| on n=2 the overlap t = |<e1|Z>|² has density 2t, whose
  // mean is the 1-D integral of 2t² over [0,1], i.e. 2/3
  const auto w = DensityMatrix::pure(PureState::basis(2, 0));
  RhoSampler sampler(w);
  const std::size_t n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng = RandomStream::substream(319, i);
    const double t = std::norm(sampler.draw(rng).vector()(0));
    sum += t;
    sum2 += t * t;
  }
  const auto est = mc_from_totals(sum, sum2, n);
  REQUIRE(std::abs(est.value - 2.0 / 3.0) < 4.0 * est.std_error);
}

TEST_CASE("sample_rho mean projector is the diluted state", "[fs]") {
  RandomStream seed_rng(321);
  const Eigen::Index n = 3;
  const auto w = random_density(n, 2, seed_rng);
  RhoSampler sampler(w);
  const std::size_t trials = 100000;
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  RealMatrix sum_sq = RealMatrix::Zero(n, n);
  for (std::size_t i = 0; i < trials; ++i) {
    RandomStream rng = RandomStream::substream(323, i);
    const ComplexMatrix p = sampler.draw(rng).projector();
    sum += p;
    sum_sq += p.cwiseAbs2();
  }
  const auto est = mc_from_totals(sum, sum_sq, trials);
  const ComplexMatrix expected =
      (ComplexMatrix::Identity(n, n) + w.matrix()) / (double(n) + 1.0);
  REQUIRE(compare_estimate(est, expected).max_se_units < 4.0);
}

TEST_CASE("sample_rho is reproducible including retries", "[fs]") {
  RandomStream seed_rng(325);
  const auto w = random_density(3, 1, seed_rng);  // pure: plenty of rejections
  RhoSampler sampler(w);
  RandomStream a(99), b(99);
  for (int i = 0; i < 20; ++i) {
    REQUIRE(sampler.draw(a).vector() == sampler.draw(b).vector());
  }
}

TEST_CASE("mc_integrate of a constant has zero error", "[fs]") {
  const auto est =
      mc_integrate([](const PureState&) { return 1.0; }, 2, 1000, 327);
  REQUIRE(est.value == Approx(1.0));
  REQUIRE(est.std_error == Approx(0.0).margin(1e-12));
}

TEST_CASE("mc_integrate reproduces the fourth-moment integral", "[fs]") {
  // |Z1|⁴ for n=2: E[t²] with t uniform on [0,1] is 1/3
  const auto est = mc_integrate(
      [](const PureState& x) {
        const double t = std::norm(x.vector()(0));
        return t * t;
      },
      2, 100000, 329);
  REQUIRE(std::abs(est.value - 1.0 / 3.0) < 4.0 * est.std_error);
}

TEST_CASE("mc_integrate is thread-count invariant", "[fs]") {
  auto f = [](const PureState& x) { return std::norm(x.vector()(0)); };
  const auto seq = mc_integrate(f, 3, 20000, 331, 1);
  const auto par = mc_integrate(f, 3, 20000, 331, 4);
  REQUIRE(seq.value == par.value);
  REQUIRE(seq.std_error == par.std_error);
}

TEST_CASE("quadratic moment identity holds by Monte Carlo", "[fs]") {
  // n = 1 is a single point: exact equality with (1+1)/(1*2) = 1
  const auto exact = check_quadratic_identity(1, 100, 333);
  REQUIRE(exact.max_abs_deviation <= 1e-12);
  REQUIRE(exact.max_se_units == 0.0);

  for (Eigen::Index n : {2, 3}) {
    const auto report = check_quadratic_identity(n, 100000, 335);
    REQUIRE(report.max_se_units < 5.0);
  }
}

TEST_CASE("quadratic moment identity frozen component", "[fs]") {
  // the (1,1,1,1) component of the closed form for n=2 is 2/(2*3) = 1/3
  const ComplexMatrix expected =
      (ComplexMatrix::Identity(4, 4) + swap_matrix(2)) / 6.0;
  REQUIRE(expected(0, 0).real() == Approx(1.0 / 3.0));
}

TEST_CASE("effect of the full space is the identity", "[fs]") {
  const Eigen::Index n = 3;
  const auto est = mc_integrate_matrix(
      [n](const PureState& x) {
        return ComplexMatrix(static_cast<double>(n) * x.projector());
      },
      n, 100000, 337);
  REQUIRE(compare_estimate(est, ComplexMatrix::Identity(n, n)).max_se_units <
          4.0);

  const auto op = effect_estimate([](const PureState&) { return true; }, n,
                                  20000, 339);
  REQUIRE(max_abs_diff(op.matrix(), ComplexMatrix::Identity(n, n)) < 0.1);
}

TEST_CASE("effect of the empty region vanishes", "[fs]") {
  const auto op = effect_estimate([](const PureState&) { return false; }, 2,
                                  1000, 341);
  REQUIRE(op.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effect of a half region matches the 1-D oracle", "[fs]") {
  // region |<e1|Z>|² > 1/2 on n=2: diagonal by symmetry with entries
  // 2*int_{1/2}^{1} t dt = 3/4 and 2*int_{1/2}^{1} (1-t) dt = 1/4
  const auto est = mc_integrate_matrix(
      [](const PureState& x) {
        const bool in = std::norm(x.vector()(0)) > 0.5;
        return in ? ComplexMatrix(2.0 * x.projector())
                  : ComplexMatrix(ComplexMatrix::Zero(2, 2));
      },
      2, 100000, 343);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = 0.75;
  expected(1, 1) = 0.25;
  REQUIRE(compare_estimate(est, expected).max_se_units < 4.0);
}
