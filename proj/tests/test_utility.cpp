// Copyright 2026 The poalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "poalab/utility.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "poalab/numeric.hpp"

using namespace poalab;

namespace {

// high-precision references (mpmath, 50 digits)
constexpr double kExpScaledHalf = 0.62245933120185456;    // (1-e^-0.5)/(1-e^-1)
constexpr double kExpScaledLoseHalf = -1.0262619394982736;  // (1-e^0.5)/(1-e^-1)

}  // namespace

TEST_CASE("quasilinear utility") {
  const auto m = UtilityModel::quasilinear(1.0);
  CHECK(eval_utility(m, 1.0, 0.9).value() == Catch::Approx(0.1).margin(1e-15));
  CHECK(eval_utility(m, 0.0, 0.5).value() == Catch::Approx(-0.5));
}

TEST_CASE("scaled risk-averse exponential utility") {
  const auto m = UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::exponential());
  CHECK(eval_utility(m, 1.0, 1.0).value() == Catch::Approx(0.0).margin(1e-15));
  CHECK(eval_utility(m, 1.0, 0.0).value() == Catch::Approx(1.0).margin(1e-15));
  CHECK(eval_utility(m, 1.0, 0.5).value() ==
        Catch::Approx(kExpScaledHalf).epsilon(1e-14));
  // losing branch: pay the bid, receive nothing
  CHECK(eval_utility(m, 0.0, 0.5).value() ==
        Catch::Approx(kExpScaledLoseHalf).epsilon(1e-14));
}

TEST_CASE("scaled model with zero valuation") {
  const auto m = UtilityModel::scaled_risk_averse(0.0, ConcaveTransform::exponential());
  CHECK(eval_utility(m, 0.0, 0.0).value() == 0.0);
  CHECK_THROWS_AS(eval_utility(m, 0.0, 0.5), std::domain_error);
  const auto with_convention = m.with_zero_value_convention();
  CHECK(eval_utility(with_convention, 0.0, 0.5).value() == Catch::Approx(-0.5));
}

TEST_CASE("budgeted utility uses the sentinel, never a number") {
  const auto inner = UtilityModel::quasilinear(2.0);
  const auto m = UtilityModel::budgeted(inner, 1.5);
  CHECK(eval_utility(m, 2.0, 1.0).value() == Catch::Approx(1.0));
  CHECK_FALSE(eval_utility(m, 2.0, 1.6).has_value());
}

TEST_CASE("piecewise transform evaluates both slopes and stays continuous") {
  const auto h = ConcaveTransform::piecewise_linear(5.0);
  CHECK(h(2.0) == 2.0);
  CHECK(h(-2.0) == -10.0);
  CHECK(h(1e-12) == Catch::Approx(0.0).margin(1e-11));
  CHECK(h(-1e-12) == Catch::Approx(0.0).margin(1e-11));
  CHECK_THROWS_AS(ConcaveTransform::piecewise_linear(0.5), std::invalid_argument);
}

TEST_CASE("exponential transform is exact") {
  const auto h = ConcaveTransform::exponential();
  for (double x : {-3.0, -0.5, 0.0, 0.1, 2.0, 30.0}) {
    CHECK(h(x) == Catch::Approx(1.0 - std::exp(-x)).margin(1e-16));
  }
}

TEST_CASE("tabulated transform interpolates monotonically") {
  const auto h = ConcaveTransform::tabulated({-1.0, 0.0, 1.0, 2.0},
                                             {-2.0, 0.0, 0.9, 1.5});
  CHECK(h(0.5) == Catch::Approx(0.45));
  CHECK(h(-0.5) == Catch::Approx(-1.0));
  CHECK(h(3.0) == Catch::Approx(2.1));  // extended with the end slope
  double prev = -kInf;
  for (int i = 0; i <= 100; ++i) {
    const double y = h(-1.5 + 4.0 * i / 100.0);
    CHECK(y >= prev - 1e-15);
    prev = y;
  }
}

TEST_CASE("transform monotonicity property") {
  Rng rng(991);
  const auto hs = {ConcaveTransform::linear(), ConcaveTransform::exponential(),
                   ConcaveTransform::piecewise_linear(3.0)};
  for (const auto& h : hs) {
    for (int trial = 0; trial < 200; ++trial) {
      const double x1 = rng.uniform(-5, 5);
      const double x2 = x1 + rng.uniform(0, 3);
      CHECK(h(x1) <= h(x2) + 1e-15);
    }
  }
}

TEST_CASE("linear transform reproduces quasilinear exactly") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = rng.uniform(0.01, 4);
    const double p = rng.uniform(0, 2 * v);
    const auto scaled = UtilityModel::scaled_risk_averse(v, ConcaveTransform::linear());
    const auto quasi = UtilityModel::quasilinear(v);
    const double vx = rng.next_double() < 0.5 ? v : 0.0;
    CHECK(std::abs(eval_utility(scaled, vx, p).value() -
                   eval_utility(quasi, vx, p).value()) <= 1e-12);
  }
}

TEST_CASE("check_normalization accepts the normalized families") {
  std::vector<double> vs = {0.5, 1.0, 2.0};
  std::vector<double> ps;
  for (int i = 0; i <= 64; ++i) ps.push_back(4.0 * i / 64.0);
  const auto expo =
      UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::exponential());
  CHECK(check_normalization(expo, vs, ps).pass);
  const auto quasi = UtilityModel::quasilinear(1.0);
  CHECK(check_normalization(quasi, vs, ps).pass);
}

TEST_CASE("check_normalization randomized 1000 trials") {
  Rng rng(20260809);
  const auto protos = {UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::exponential()),
                       UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::piecewise_linear(4.0)),
                       UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::piecewise_linear(1.0))};
  int trials = 0;
  for (int t = 0; t < 334; ++t) {
    for (const auto& proto : protos) {
      if (trials >= 1000) break;
      const double v = rng.uniform(0.05, 5.0);
      std::vector<double> vg = {v};
      std::vector<double> pg;
      for (int i = 0; i <= 40; ++i) pg.push_back(2.0 * v * i / 40.0);
      REQUIRE(check_normalization(proto, vg, pg).pass);
      ++trials;
    }
  }
  CHECK(trials >= 1000);
}

TEST_CASE("check_normalization flags a non-normalized model") {
  // u(p) = v - 2p via a tabulated 'transform' that doubles the payment slope:
  // h(x) = 2x - v on [0, v] after the scaling gives u(v/2) = 0 < v - v/2.
  const double v = 1.0;
  const auto bad = UtilityModel::scaled_risk_averse(
      v, ConcaveTransform::tabulated({-2.0, 1.0}, {-5.0, 1.0}));
  // h(x) = 2x - 1 on the segment: h(v)=1, so u(p) = (2(v-p)-1)v/h(v) = 1-2p
  std::vector<double> vg = {v};
  std::vector<double> pg;
  for (int i = 0; i <= 16; ++i) pg.push_back(v * i / 16.0);
  const auto report = check_normalization(bad, vg, pg);
  REQUIRE_FALSE(report.pass);
  CHECK(report.violation.has_value());
}

TEST_CASE("cap_valuation") {
  CHECK(cap_valuation(5.0, 3.0) == 3.0);
  CHECK(cap_valuation(2.0, kInf) == 2.0);
  const std::vector<double> v = {7.0, 3.0};
  const std::vector<double> b = {4.0, 4.0};
  const auto capped = cap_valuation(std::span<const double>(v), std::span<const double>(b));
  CHECK(capped[0] == 4.0);
  CHECK(capped[1] == 3.0);
}

TEST_CASE("variance adjusted lottery") {
  Lottery coin{{{0.5, 1.0}, {0.5, 0.0}}};
  CHECK(variance_adjusted(coin, 1.0) == 0.0);  // 1/2 - 1/2, exact
  CHECK(variance_adjusted(coin, 0.0) == 0.5);
  Lottery sure{{{1.0, 5.0}}};
  CHECK(variance_adjusted(sure, 0.7) == 5.0);
  // non-increasing in gamma
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Lottery l;
    double rest = 1.0;
    for (int k = 0; k < 3; ++k) {
      const double p = k == 2 ? rest : rng.next_double() * rest;
      rest -= k == 2 ? 0 : p;
      l.outcomes.emplace_back(p, rng.uniform(-2, 2));
    }
    double prev = kInf;
    for (double gamma : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double u = variance_adjusted(l, gamma);
      CHECK(u <= prev + 1e-12);
      prev = u;
    }
  }
}

TEST_CASE("lottery validation") {
  Lottery bad{{{0.5, 1.0}, {0.6, 0.0}}};
  CHECK_THROWS_AS(variance_adjusted(bad, 0.5), std::invalid_argument);
  Lottery neg{{{-0.1, 1.0}, {1.1, 0.0}}};
  CHECK_THROWS_AS(variance_adjusted(neg, 0.5), std::invalid_argument);
}
