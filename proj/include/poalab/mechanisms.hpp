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

#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poalab/numeric.hpp"

namespace poalab {

enum class MechanismKind { kFirstPrice, kSecondPrice, kAllPay, kTwoItemPreference };
enum class TieBreak { kUniformRandom, kLowestIndex };

inline const char* to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::kFirstPrice: return "first-price";
    case MechanismKind::kSecondPrice: return "second-price";
    case MechanismKind::kAllPay: return "all-pay";
    case MechanismKind::kTwoItemPreference: return "two-item-preference";
  }
  return "?";
}

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kFirstPrice;
  TieBreak tie_break = TieBreak::kUniformRandom;
  int n_players = 2;
};

/// Realized single-item auction outcome: one winner (allocation share 1),
/// everyone's payment fixed by the payment rule.
struct OutcomeRecord {
  int winner = -1;                 // index of the allocated player
  std::vector<double> alloc;       // allocation share per player (0 or 1)
  std::vector<double> payments;    // money per player

  double revenue() const {
    double r = 0;
    for (double p : payments) r += p;
    return r;
  }
};

struct WeightedOutcome {
  OutcomeRecord outcome;
  double probability = 1.0;
};

using OutcomeDistribution = std::vector<WeightedOutcome>;

namespace detail {

inline void check_bids(const MechanismSpec& m, std::span<const double> bids) {
  if (m.kind == MechanismKind::kTwoItemPreference) {
    throw std::invalid_argument("two-item mechanism takes item choices, not bids");
  }
  if (static_cast<int>(bids.size()) != m.n_players) {
    throw std::invalid_argument("bid profile arity mismatch");
  }
  for (double b : bids) {
    if (!(b >= 0)) throw std::invalid_argument("bids must be >= 0");
  }
}

inline OutcomeRecord outcome_for_winner(const MechanismSpec& m,
                                        std::span<const double> bids, int winner) {
  const int n = m.n_players;
  OutcomeRecord out;
  out.winner = winner;
  out.alloc.assign(n, 0.0);
  out.alloc[winner] = 1.0;
  out.payments.assign(n, 0.0);
  switch (m.kind) {
    case MechanismKind::kFirstPrice:
      out.payments[winner] = bids[winner];
      break;
    case MechanismKind::kSecondPrice: {
      double second = 0;
      for (int j = 0; j < n; ++j) {
        if (j != winner) second = std::max(second, bids[j]);
      }
      out.payments[winner] = second;
      break;
    }
    case MechanismKind::kAllPay:
      for (int j = 0; j < n; ++j) out.payments[j] = bids[j];
      break;
    case MechanismKind::kTwoItemPreference:
      break;  // unreachable
  }
  return out;
}

inline std::vector<int> top_bidders(std::span<const double> bids) {
  const double top = *std::max_element(bids.begin(), bids.end());
  std::vector<int> tied;
  for (int i = 0; i < static_cast<int>(bids.size()); ++i) {
    if (bids[i] == top) tied.push_back(i);
  }
  return tied;
}

}  // namespace detail

/// Full outcome distribution of a single-item auction; under UniformRandom
/// tie-breaking each tied top bidder wins with probability exactly 1/k.
inline OutcomeDistribution run_mechanism_exhaustive(const MechanismSpec& m,
                                                    std::span<const double> bids) {
  detail::check_bids(m, bids);
  const std::vector<int> tied = detail::top_bidders(bids);
  OutcomeDistribution dist;
  if (m.tie_break == TieBreak::kLowestIndex || tied.size() == 1) {
    dist.push_back({detail::outcome_for_winner(m, bids, tied.front()), 1.0});
    return dist;
  }
  const double p = 1.0 / static_cast<double>(tied.size());
  for (int w : tied) dist.push_back({detail::outcome_for_winner(m, bids, w), p});
  return dist;
}

/// One realized outcome; the seed resolves UniformRandom ties.
inline OutcomeRecord run_mechanism(const MechanismSpec& m, std::span<const double> bids,
                                   std::uint64_t tie_seed = 0) {
  detail::check_bids(m, bids);
  const std::vector<int> tied = detail::top_bidders(bids);
  int winner = tied.front();
  if (m.tie_break == TieBreak::kUniformRandom && tied.size() > 1) {
    Rng rng(tie_seed);
    winner = tied[rng.next_index(tied.size())];
  }
  return detail::outcome_for_winner(m, bids, winner);
}

// ---------------------------------------------------------------------------
// Two-item preference mechanism (two players, no payments): player 1 receives
// her claimed item; player 2 receives the remaining item unless she opts out.
// ---------------------------------------------------------------------------

enum class TwoItemAction { kItem1 = 0, kItem2 = 1, kOptOut = 2 };

struct TwoItemOutcome {
  // item index assigned to each player, -1 if none
  int item_of_player[2] = {-1, -1};
};

inline TwoItemOutcome run_two_item(TwoItemAction first, TwoItemAction second) {
  TwoItemOutcome out;
  if (first != TwoItemAction::kOptOut) {
    out.item_of_player[0] = static_cast<int>(first);
  }
  if (second != TwoItemAction::kOptOut) {
    if (first == TwoItemAction::kOptOut) {
      // both items free; the participant gets her claimed item
      out.item_of_player[1] = static_cast<int>(second);
    } else {
      out.item_of_player[1] = 1 - out.item_of_player[0];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Willingness-to-pay and pointwise no-overbidding
// ---------------------------------------------------------------------------

/// Max payment of `player` bidding `own_bid` over all opponent profiles on
/// `opponent_grid` whose realized allocation matches `allocated` (with
/// positive probability under the tie policy). Throws if the allocation is
/// unreachable on the grid.
inline double willingness_to_pay(const MechanismSpec& m, int player, double own_bid,
                                 bool allocated, std::span<const double> opponent_grid) {
  if (m.kind == MechanismKind::kTwoItemPreference) return 0.0;  // no payments
  if (player < 0 || player >= m.n_players) {
    throw std::invalid_argument("willingness_to_pay: bad player index");
  }
  if (opponent_grid.empty()) {
    throw std::invalid_argument("willingness_to_pay: empty opponent grid");
  }
  const int n = m.n_players;
  std::vector<double> bids(n, 0.0);
  bids[player] = own_bid;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n - 1), 0);
  bool reachable = false;
  double best = 0;
  while (true) {
    int k = 0;
    for (int j = 0; j < n; ++j) {
      if (j != player) bids[j] = opponent_grid[idx[k++]];
    }
    for (const auto& [outcome, prob] : run_mechanism_exhaustive(m, bids)) {
      if (prob <= 0) continue;
      if ((outcome.winner == player) == allocated) {
        reachable = true;
        best = std::max(best, outcome.payments[player]);
      }
    }
    // advance the odometer
    int pos = 0;
    for (; pos < n - 1; ++pos) {
      if (++idx[pos] < opponent_grid.size()) break;
      idx[pos] = 0;
    }
    if (pos == n - 1) break;
  }
  if (!reachable) {
    throw std::domain_error("willingness_to_pay: allocation unreachable on grid");
  }
  return best;
}

struct OverbiddingViolation {
  int player = -1;
  double action = 0;
};

struct OverbiddingReport {
  bool pass = true;
  std::optional<OverbiddingViolation> violation;
};

/// Pointwise no-overbidding: W_i(a_i, x) <= v_i(x) for every support action
/// and every reachable allocation. For single-item auctions only winning
/// allocations carry value, so the binding check is W_i(a_i, win) <= v_i.
inline OverbiddingReport check_pointwise_no_overbidding(
    const MechanismSpec& m, std::span<const std::vector<double>> support_per_player,
    std::span<const double> valuations, std::span<const double> opponent_grid) {
  if (static_cast<int>(support_per_player.size()) != m.n_players ||
      static_cast<int>(valuations.size()) != m.n_players) {
    throw std::invalid_argument("check_pointwise_no_overbidding: arity mismatch");
  }
  OverbiddingReport report;
  for (int i = 0; i < m.n_players; ++i) {
    for (double a : support_per_player[i]) {
      for (bool allocated : {true, false}) {
        double w;
        try {
          w = willingness_to_pay(m, i, a, allocated, opponent_grid);
        } catch (const std::domain_error&) {
          continue;  // allocation unreachable for this action
        }
        const double value = allocated ? valuations[i] : 0.0;
        if (w > value + 1e-12) {
          report.pass = false;
          report.violation = OverbiddingViolation{i, a};
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace poalab
