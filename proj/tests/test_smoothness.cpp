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

#include "poalab/smoothness.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "poalab/equilibria.hpp"

using namespace poalab;

namespace {

SmoothnessInstance three_player_instance(MechanismKind kind, int value_points = 10,
                                         int bid_points = 20) {
  SmoothnessInstance inst;
  inst.mechanism = MechanismSpec{kind, TieBreak::kUniformRandom, 3};
  for (int i = 0; i < 3; ++i) {
    std::vector<double> vg;
    for (int k = 1; k <= value_points; ++k) {
      vg.push_back(static_cast<double>(k) / value_points);
    }
    inst.value_grids.push_back(vg);
  }
  for (int k = 0; k <= bid_points; ++k) {
    inst.bid_grid.push_back(static_cast<double>(k) / bid_points);
  }
  return inst;
}

}  // namespace

TEST_CASE("poa bound formulas") {
  CHECK(poa_bound({1.0 - 1.0 / std::exp(1.0), 1.0}) ==
        Catch::Approx(1.0 - 1.0 / std::exp(1.0)));
  CHECK(poa_bound({0.5, 1.0}) == 0.5);
  CHECK(poa_bound({1.0, 0.0}) == 1.0);
  CHECK_THROWS_AS(poa_bound({0.0, 1.0}), std::invalid_argument);
  CHECK(weak_poa_bound({1.0, 0.0, 1.0}) == 0.5);
  CHECK(weak_poa_bound({0.5, 1.0, 0.0}) == 0.5);  // reduces to poa_bound
  CHECK(weak_poa_bound({0.5, 1.0, 1.0}) == 0.25);
}

TEST_CASE("risk transfer") {
  const SmoothnessParams fp{1.0 - 1.0 / std::exp(1.0), 1.0};
  const auto t = risk_transfer(fp);
  CHECK(t.lambda == Catch::Approx(0.5 * (1.0 - 1.0 / std::exp(1.0))));
  CHECK(t.mu == 1.0);
  CHECK(poa_bound(t) == Catch::Approx((1.0 - 1.0 / std::exp(1.0)) / 2.0));
  const auto relaxed = risk_transfer({1.0, 1.0}, 0.5);
  CHECK(relaxed.lambda == 0.25);
  CHECK(relaxed.mu == 0.5);
  // applying the transfer twice halves lambda again
  const auto twice = risk_transfer(t);
  CHECK(twice.lambda == Catch::Approx(t.lambda / 2.0));
  CHECK_THROWS_AS(risk_transfer({1.0, 1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("all-pay is (1/2, 1)-smooth on the grid") {
  const auto inst = three_player_instance(MechanismKind::kAllPay);
  const auto cert = certify_smoothness(inst, DeviationGenerator::half_value_top_bidder(),
                                       {0.5, 1.0});
  CHECK(cert.certified);
  CHECK(cert.min_slack >= -1e-12);
}

TEST_CASE("first price is (1/2, 1)-smooth on the grid") {
  const auto inst = three_player_instance(MechanismKind::kFirstPrice);
  const auto cert = certify_smoothness(inst, DeviationGenerator::half_value_top_bidder(),
                                       {0.5, 1.0});
  CHECK(cert.certified);
}

TEST_CASE("all-pay (1, 0) is falsified with a counterexample") {
  const auto inst = three_player_instance(MechanismKind::kAllPay, 6, 12);
  const auto cert = certify_smoothness(inst, DeviationGenerator::half_value_top_bidder(),
                                       {1.0, 0.0});
  REQUIRE_FALSE(cert.certified);
  REQUIRE(cert.counterexample.has_value());
  CHECK(cert.counterexample->lhs < cert.counterexample->rhs);
}

TEST_CASE("second price is weakly (1, 0, 1)-smooth with truthful deviations") {
  const auto inst = three_player_instance(MechanismKind::kSecondPrice, 8, 16);
  const auto cert = certify_weak_smoothness(inst, DeviationGenerator::truthful_bid(),
                                            {1.0, 0.0, 1.0});
  CHECK(cert.certified);
}

TEST_CASE("second price weak (1, 0, 0) fails on an overbidding profile") {
  const auto inst = three_player_instance(MechanismKind::kSecondPrice, 6, 12);
  const auto cert = certify_weak_smoothness(inst, DeviationGenerator::truthful_bid(),
                                            {1.0, 0.0, 0.0});
  REQUIRE_FALSE(cert.certified);
  CHECK(cert.counterexample.has_value());
}

TEST_CASE("weak certification with mu2 = 0 matches plain certification") {
  const auto inst = three_player_instance(MechanismKind::kFirstPrice, 5, 10);
  const auto dev = DeviationGenerator::half_value_top_bidder();
  for (const auto params : {SmoothnessParams{0.5, 1.0}, SmoothnessParams{0.9, 0.2}}) {
    const auto plain = certify_smoothness(inst, dev, params);
    const auto weak =
        certify_weak_smoothness(inst, dev, {params.lambda, params.mu, 0.0});
    CHECK(plain.certified == weak.certified);
    CHECK(plain.min_slack == Catch::Approx(weak.min_slack).margin(1e-12));
  }
}

TEST_CASE("non-negative deviation utility") {
  SECTION("first price: bids below value never go negative") {
    const auto inst = three_player_instance(MechanismKind::kFirstPrice, 5, 10);
    CHECK(check_nonneg_deviation_utility(inst,
                                         DeviationGenerator::half_value_top_bidder())
              .pass);
    CHECK(check_nonneg_deviation_utility(inst, DeviationGenerator::truthful_bid()).pass);
  }
  SECTION("all pay: losing still pays") {
    const auto inst = three_player_instance(MechanismKind::kAllPay, 5, 10);
    const auto report = check_nonneg_deviation_utility(
        inst, DeviationGenerator::half_value_top_bidder());
    REQUIRE_FALSE(report.pass);
    CHECK(report.violation->utility < 0);
  }
  SECTION("zero-bid deviations are safe everywhere") {
    const auto inst = three_player_instance(MechanismKind::kAllPay, 4, 8);
    const auto zero = DeviationGenerator::custom_table(
        {{{0.0, 1.0}}, {{0.0, 1.0}}, {{0.0, 1.0}}});
    CHECK(check_nonneg_deviation_utility(inst, zero).pass);
  }
}

TEST_CASE("lemma-2 transfer holds on the grid: risk-averse first price") {
  // quasilinear certificate
  auto inst = three_player_instance(MechanismKind::kFirstPrice, 6, 12);
  const auto dev = DeviationGenerator::half_value_top_bidder();
  const SmoothnessParams quasi{0.5, 1.0};
  REQUIRE(certify_smoothness(inst, dev, quasi).certified);
  REQUIRE(check_nonneg_deviation_utility(inst, dev).pass);
  // transferred certificate under the exponential transform, against the
  // risk-averse optimum
  inst.prototype = UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::exponential());
  const auto transferred = risk_transfer(quasi);
  const auto cert = certify_smoothness(inst, dev, transferred,
                                       Benchmark::kRiskAverseOpt, 1e-9, 128);
  CHECK(cert.certified);
}

TEST_CASE("budget transfer") {
  SECTION("first price with finite budgets certifies against liquid welfare") {
    auto inst = three_player_instance(MechanismKind::kFirstPrice, 5, 10);
    inst.prototype =
        UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::exponential());
    inst.budgets = {1.0, 0.5, 0.8};
    const auto cert = budget_transfer_check(inst, DeviationGenerator::half_value_top_bidder(),
                                            {0.5, 1.0}, 1e-9, 128);
    CHECK(cert.certified);
  }
  SECTION("infinite budgets reduce to the risk transfer setting") {
    auto inst = three_player_instance(MechanismKind::kFirstPrice, 4, 8);
    inst.budgets = {kInf, kInf, kInf};
    const auto cert = budget_transfer_check(inst, DeviationGenerator::half_value_top_bidder(),
                                            {0.5, 1.0}, 1e-9, 128);
    CHECK(cert.certified);
  }
  SECTION("all pay fails the hypothesis") {
    auto inst = three_player_instance(MechanismKind::kAllPay, 4, 8);
    inst.budgets = {1.0, 1.0, 1.0};
    const auto cert = budget_transfer_check(inst, DeviationGenerator::half_value_top_bidder(),
                                            {0.5, 1.0}, 1e-9, 64);
    CHECK_FALSE(cert.certified);
    CHECK(cert.note.find("non-negative") != std::string::npos);
  }
}

TEST_CASE("certified equilibrium welfare satisfies the smoothness guarantee") {
  // (1/2, 1)-certificate for first price, then a learned equilibrium must
  // carry welfare >= lambda/max(1,mu) * OPT-hat - eps * n at grid scale.
  MechanismSpec mech{MechanismKind::kFirstPrice, TieBreak::kUniformRandom, 2};
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(i / 16.0);
  const std::vector<double> values = {0.75, 1.0};
  SmoothnessInstance inst;
  inst.mechanism = mech;
  inst.value_grids = {{values[0]}, {values[1]}};
  inst.bid_grid = grid;
  const auto cert = certify_smoothness(inst, DeviationGenerator::half_value_top_bidder(),
                                       {0.5, 1.0});
  REQUIRE(cert.certified);

  const auto game = complete_info_game(
      mech, grid,
      {UtilityModel::quasilinear(values[0]), UtilityModel::quasilinear(values[1])});
  const auto learned = learn_regret_matching(game, 60000, 3);
  const auto report = ce_regret(game, learned.empirical);
  const double opt_hat = 1.0;
  CHECK(report.welfare >= 0.5 * opt_hat - report.max_regret * 2 - 1e-9);
}
