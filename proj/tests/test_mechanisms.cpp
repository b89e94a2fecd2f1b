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

#include "poalab/mechanisms.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "poalab/numeric.hpp"

using namespace poalab;

namespace {
const MechanismSpec kFp{MechanismKind::kFirstPrice, TieBreak::kUniformRandom, 2};
const MechanismSpec kSp{MechanismKind::kSecondPrice, TieBreak::kUniformRandom, 2};
const MechanismSpec kAp{MechanismKind::kAllPay, TieBreak::kUniformRandom, 2};
}  // namespace

TEST_CASE("first price: winner pays own bid") {
  const std::vector<double> bids = {3.0, 2.0};
  const auto out = run_mechanism(kFp, bids);
  CHECK(out.winner == 0);
  CHECK(out.payments[0] == 3.0);
  CHECK(out.payments[1] == 0.0);
  CHECK(out.alloc[0] == 1.0);
}

TEST_CASE("second price: winner pays the other bid") {
  const std::vector<double> bids = {3.0, 2.0};
  const auto out = run_mechanism(kSp, bids);
  CHECK(out.winner == 0);
  CHECK(out.payments[0] == 2.0);
  CHECK(out.payments[1] == 0.0);
}

TEST_CASE("all pay: everyone pays their bid") {
  const std::vector<double> bids = {3.0, 2.0};
  const auto out = run_mechanism(kAp, bids);
  CHECK(out.winner == 0);
  CHECK(out.payments[0] == 3.0);
  CHECK(out.payments[1] == 2.0);
}

TEST_CASE("uniform tie-break is exactly 1/k per tied bidder") {
  MechanismSpec m = kFp;
  m.n_players = 3;
  const std::vector<double> bids = {2.0, 2.0, 1.0};
  const auto dist = run_mechanism_exhaustive(m, bids);
  REQUIRE(dist.size() == 2);
  for (const auto& [outcome, prob] : dist) {
    CHECK(prob == 0.5);  // exact binary fraction
    CHECK((outcome.winner == 0 || outcome.winner == 1));
  }
  const std::vector<double> all_tied = {2.0, 2.0, 2.0};
  const auto dist3 = run_mechanism_exhaustive(m, all_tied);
  REQUIRE(dist3.size() == 3);
  for (const auto& [outcome, prob] : dist3) CHECK(prob == 1.0 / 3.0);
}

TEST_CASE("lowest index tie-break is deterministic") {
  MechanismSpec m = kAp;
  m.tie_break = TieBreak::kLowestIndex;
  m.n_players = 3;
  const std::vector<double> bids = {2.0, 2.0, 2.0};
  const auto dist = run_mechanism_exhaustive(m, bids);
  REQUIRE(dist.size() == 1);
  CHECK(dist[0].outcome.winner == 0);
  CHECK(dist[0].probability == 1.0);
}

TEST_CASE("bid validation") {
  CHECK_THROWS_AS(run_mechanism(kFp, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(run_mechanism(kFp, std::vector<double>{1.0, -0.5}),
                  std::invalid_argument);
}

TEST_CASE("revenue identities across random profiles") {
  Rng rng(17);
  MechanismSpec fp = kFp, sp = kSp, ap = kAp;
  fp.n_players = sp.n_players = ap.n_players = 3;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> bids = {rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)};
    const double top = *std::max_element(bids.begin(), bids.end());
    double sum = 0;
    for (double b : bids) sum += b;
    CHECK(run_mechanism(fp, bids).revenue() == Catch::Approx(top));
    CHECK(run_mechanism(ap, bids).revenue() == Catch::Approx(sum));
    CHECK(run_mechanism(sp, bids).revenue() <= top + 1e-15);
  }
}

TEST_CASE("two-item mechanism") {
  const auto out = run_two_item(TwoItemAction::kItem1, TwoItemAction::kItem2);
  CHECK(out.item_of_player[0] == 0);
  CHECK(out.item_of_player[1] == 1);  // remaining item, not her claim
  const auto swapped = run_two_item(TwoItemAction::kItem2, TwoItemAction::kItem2);
  CHECK(swapped.item_of_player[0] == 1);
  CHECK(swapped.item_of_player[1] == 0);
  const auto optout = run_two_item(TwoItemAction::kItem1, TwoItemAction::kOptOut);
  CHECK(optout.item_of_player[0] == 0);
  CHECK(optout.item_of_player[1] == -1);
  // never both items to one player
  for (auto a : {TwoItemAction::kItem1, TwoItemAction::kItem2, TwoItemAction::kOptOut}) {
    for (auto b : {TwoItemAction::kItem1, TwoItemAction::kItem2, TwoItemAction::kOptOut}) {
      const auto o = run_two_item(a, b);
      if (o.item_of_player[0] >= 0 && o.item_of_player[1] >= 0) {
        CHECK(o.item_of_player[0] != o.item_of_player[1]);
      }
    }
  }
}

TEST_CASE("willingness to pay") {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(3.0 * i / 30.0);
  // first price, allocated: pays own bid
  CHECK(willingness_to_pay(kFp, 0, 3.0, true, grid) == Catch::Approx(3.0));
  // second price, allocated, grid dense in [0,3]: supremum at the grid max <= 3
  CHECK(willingness_to_pay(kSp, 0, 3.0, true, grid) == Catch::Approx(3.0));
  // all pay: pays the bid either way
  CHECK(willingness_to_pay(kAp, 0, 3.0, false, grid) == Catch::Approx(3.0));
  CHECK(willingness_to_pay(kAp, 0, 3.0, true, grid) == Catch::Approx(3.0));
  // losing in first/second price costs nothing
  CHECK(willingness_to_pay(kFp, 0, 1.0, false, grid) == 0.0);
  CHECK(willingness_to_pay(kSp, 0, 1.0, false, grid) == 0.0);
}

TEST_CASE("willingness to pay: unreachable allocation") {
  // a zero bid can never win under lowest-index tie-break for player 1
  MechanismSpec m = kFp;
  m.tie_break = TieBreak::kLowestIndex;
  const std::vector<double> grid = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(willingness_to_pay(m, 1, 0.0, true, grid), std::domain_error);
  // under uniform ties the same allocation is reachable
  CHECK(willingness_to_pay(kFp, 1, 0.0, true, grid) == 0.0);
}

TEST_CASE("willingness to pay is monotone in the own bid") {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(i / 4.0);
  for (const auto& m : {kFp, kSp, kAp}) {
    double prev = -1;
    for (double b : {0.0, 0.5, 1.0, 1.75, 2.5}) {
      const double w = willingness_to_pay(m, 0, b, true, grid);
      CHECK(w >= prev - 1e-15);
      prev = w;
    }
  }
}

TEST_CASE("pointwise no-overbidding") {
  std::vector<double> grid;
  for (int i = 0; i <= 24; ++i) grid.push_back(6.0 * i / 24.0);
  const std::vector<std::vector<double>> support_ok = {{3.0}, {2.0}};
  const std::vector<double> values = {5.0, 5.0};
  CHECK(check_pointwise_no_overbidding(kSp, support_ok, values, grid).pass);

  const std::vector<std::vector<double>> support_over = {{6.0}, {2.0}};
  const auto report = check_pointwise_no_overbidding(kSp, support_over, values, grid);
  REQUIRE_FALSE(report.pass);
  CHECK(report.violation->player == 0);
  CHECK(report.violation->action == 6.0);

  // first price with bids below value always passes
  const std::vector<std::vector<double>> support_fp = {{0.0, 2.0, 4.5}, {1.0, 5.0}};
  CHECK(check_pointwise_no_overbidding(kFp, support_fp, values, grid).pass);
}
