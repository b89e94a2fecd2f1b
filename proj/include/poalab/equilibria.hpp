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
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poalab/mechanisms.hpp"
#include "poalab/utility.hpp"
#include "poalab/welfare.hpp"

namespace poalab {

struct PlayerSpec {
  std::vector<double> type_values;
  std::vector<double> type_probs;
  std::vector<UtilityModel> models;  // one per type
};

/// Finite Bayesian game: independent type grids per player, a shared bid
/// grid, a single-item mechanism, and a utility model per (player, type).
struct DiscretizedBayesianGame {
  MechanismSpec mechanism;
  std::vector<double> bid_grid;
  std::vector<PlayerSpec> players;

  void validate() const {
    if (static_cast<int>(players.size()) != mechanism.n_players) {
      throw std::invalid_argument("game: player count mismatch");
    }
    if (bid_grid.size() < 1 || bid_grid.front() != 0.0) {
      throw std::invalid_argument("game: bid grid must start at 0");
    }
    for (std::size_t k = 0; k + 1 < bid_grid.size(); ++k) {
      if (!(bid_grid[k] < bid_grid[k + 1])) {
        throw std::invalid_argument("game: bid grid must be ascending");
      }
    }
    for (const auto& pl : players) {
      if (pl.type_values.size() != pl.type_probs.size() ||
          pl.type_values.size() != pl.models.size() || pl.type_values.empty()) {
        throw std::invalid_argument("game: inconsistent type grid");
      }
      double total = 0;
      for (double p : pl.type_probs) {
        if (p < 0) throw std::invalid_argument("game: negative type probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("game: type probabilities must sum to 1");
      }
    }
  }

  bool complete_info() const {
    for (const auto& pl : players) {
      if (pl.type_values.size() != 1) return false;
    }
    return true;
  }

  int n_players() const { return mechanism.n_players; }
  int n_bids() const { return static_cast<int>(bid_grid.size()); }
};

/// Complete-information game from one utility model per player.
inline DiscretizedBayesianGame complete_info_game(const MechanismSpec& mech,
                                                  std::vector<double> bid_grid,
                                                  std::vector<UtilityModel> models) {
  DiscretizedBayesianGame g;
  g.mechanism = mech;
  g.mechanism.n_players = static_cast<int>(models.size());
  g.bid_grid = std::move(bid_grid);
  for (auto& m : models) {
    PlayerSpec pl;
    pl.type_values = {m.valuation()};
    pl.type_probs = {1.0};
    pl.models = {std::move(m)};
    g.players.push_back(std::move(pl));
  }
  g.validate();
  return g;
}

/// Correlated distribution over bid-grid index profiles.
struct CorrelatedDist {
  struct Entry {
    std::vector<int> profile;  // bid index per player
    double prob = 0;
  };
  std::vector<Entry> support;

  void validate(const DiscretizedBayesianGame& game) const {
    double total = 0;
    for (const auto& e : support) {
      if (static_cast<int>(e.profile.size()) != game.n_players()) {
        throw std::invalid_argument("dist: profile arity mismatch");
      }
      for (int idx : e.profile) {
        if (idx < 0 || idx >= game.n_bids()) {
          throw std::invalid_argument("dist: bid index out of range");
        }
      }
      if (e.prob < 0) throw std::invalid_argument("dist: negative probability");
      total += e.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("dist: probabilities must sum to 1");
    }
  }
};

struct BidAtom {
  double bid = 0;
  double prob = 1.0;
};

/// Per-player, per-type (possibly mixed) bids. Bids need not lie on the bid
/// grid; off-grid entries carry analytic strategies such as the all-pay
/// equilibrium bid function.
struct BayesStrategy {
  std::vector<std::vector<std::vector<BidAtom>>> per_player_type;
};

// ---------------------------------------------------------------------------
// Expected utility
// ---------------------------------------------------------------------------

namespace detail {

/// Expected model utility of `player` for a raw bid profile with exhaustive
/// tie-break handling. Budgeted models are rejected up-front by callers.
inline double outcome_utility(const MechanismSpec& mech, const UtilityModel& model,
                              int player, std::span<const double> bids) {
  double u = 0;
  for (const auto& [outcome, prob] : run_mechanism_exhaustive(mech, bids)) {
    const double vx = outcome.alloc[player] * model.valuation();
    u += prob * eval_utility(model, vx, outcome.payments[player]).value();
  }
  return u;
}

inline double outcome_payment(const MechanismSpec& mech, int player,
                              std::span<const double> bids) {
  double p = 0;
  for (const auto& [outcome, prob] : run_mechanism_exhaustive(mech, bids)) {
    p += prob * outcome.payments[player];
  }
  return p;
}

/// Appends the realized (probability, utility) outcomes of a bid profile to a
/// lottery, splitting ties into distinct outcomes.
inline void append_outcomes(const MechanismSpec& mech, const UtilityModel& model,
                            int player, std::span<const double> bids, double weight,
                            Lottery& lottery) {
  for (const auto& [outcome, prob] : run_mechanism_exhaustive(mech, bids)) {
    const double vx = outcome.alloc[player] * model.valuation();
    lottery.outcomes.emplace_back(
        weight * prob, eval_utility(model, vx, outcome.payments[player]).value());
  }
}

inline void require_unbudgeted(const DiscretizedBayesianGame& game) {
  for (const auto& pl : game.players) {
    for (const auto& m : pl.models) {
      if (m.is_budgeted()) {
        throw std::invalid_argument("equilibrium analysis expects unbudgeted models");
      }
    }
  }
}

}  // namespace detail

enum class Conditioning { kNone, kOwnAction, kOwnType };

struct ExpectedUtilityResult {
  double value = 0;
  double stderr_estimate = 0;  // zero in exact mode
};

/// Exact expected utility of `player` under a correlated distribution,
/// optionally conditioned on an own bid index.
inline ExpectedUtilityResult expected_utility(const DiscretizedBayesianGame& game,
                                              const CorrelatedDist& dist, int player,
                                              Conditioning conditioning = Conditioning::kNone,
                                              int condition_index = -1) {
  game.validate();
  dist.validate(game);
  detail::require_unbudgeted(game);
  if (!game.complete_info()) {
    throw std::invalid_argument("correlated distributions require complete information");
  }
  if (conditioning == Conditioning::kOwnAction &&
      (condition_index < 0 || condition_index >= game.n_bids())) {
    throw std::invalid_argument("conditioning bid index out of range");
  }
  const auto& model = game.players[player].models[0];
  std::vector<double> bids(game.n_players());
  double total_prob = 0, value = 0;
  for (const auto& e : dist.support) {
    if (conditioning == Conditioning::kOwnAction && e.profile[player] != condition_index) {
      continue;
    }
    for (int j = 0; j < game.n_players(); ++j) bids[j] = game.bid_grid[e.profile[j]];
    value += e.prob * detail::outcome_utility(game.mechanism, model, player, bids);
    total_prob += e.prob;
  }
  if (total_prob <= 0) throw std::domain_error("conditioning event has probability 0");
  return {value / total_prob, 0.0};
}

/// Monte-Carlo estimate of the same quantity (ties sampled, not enumerated).
inline ExpectedUtilityResult expected_utility_mc(const DiscretizedBayesianGame& game,
                                                 const CorrelatedDist& dist, int player,
                                                 std::uint64_t seed, std::int64_t n_samples) {
  game.validate();
  dist.validate(game);
  detail::require_unbudgeted(game);
  if (n_samples <= 1) throw std::invalid_argument("n_samples must be > 1");
  const auto& model = game.players[player].models[0];
  Rng rng(seed);
  std::vector<double> bids(game.n_players());
  double sum = 0, sum_sq = 0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    double u = rng.next_double();
    const CorrelatedDist::Entry* chosen = &dist.support.back();
    for (const auto& e : dist.support) {
      u -= e.prob;
      if (u < 0) {
        chosen = &e;
        break;
      }
    }
    for (int j = 0; j < game.n_players(); ++j) bids[j] = game.bid_grid[chosen->profile[j]];
    const OutcomeRecord outcome = run_mechanism(game.mechanism, bids, rng.next_u64());
    const double vx = outcome.alloc[player] * model.valuation();
    const double util = eval_utility(model, vx, outcome.payments[player]).value();
    sum += util;
    sum_sq += util * util;
  }
  const double mean = sum / static_cast<double>(n_samples);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(n_samples) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

/// Exact ex-ante (or interim, when conditioned on an own type) expected
/// utility of a Bayes strategy profile.
inline ExpectedUtilityResult expected_utility(const DiscretizedBayesianGame& game,
                                              const BayesStrategy& strategy,
                                              int player,
                                              Conditioning conditioning = Conditioning::kNone,
                                              int condition_type = -1) {
  game.validate();
  detail::require_unbudgeted(game);
  const int n = game.n_players();
  if (static_cast<int>(strategy.per_player_type.size()) != n) {
    throw std::invalid_argument("strategy arity mismatch");
  }
  const auto& pl = game.players[player];
  if (conditioning == Conditioning::kOwnAction) {
    throw std::invalid_argument("own-action conditioning applies to correlated play");
  }
  if (conditioning == Conditioning::kOwnType &&
      (condition_type < 0 ||
       condition_type >= static_cast<int>(pl.type_values.size()))) {
    throw std::invalid_argument("conditioning type index out of range");
  }
  std::vector<double> bids(n);
  double value = 0;
  for (std::size_t t = 0; t < pl.type_values.size(); ++t) {
    if (conditioning == Conditioning::kOwnType &&
        static_cast<int>(t) != condition_type) {
      continue;
    }
    if (conditioning == Conditioning::kOwnType && pl.type_probs[t] <= 0) {
      throw std::domain_error("conditioning event has probability 0");
    }
    const double weight =
        conditioning == Conditioning::kOwnType ? 1.0 : pl.type_probs[t];
    // enumerate everyone's (type, atom) draws
    struct Draw {
      double prob;
      std::vector<double> bids;
    };
    std::vector<Draw> draws{{1.0, {}}};
    for (int j = 0; j < n; ++j) {
      std::vector<Draw> next;
      for (const auto& d : draws) {
        if (j == player) {
          for (const auto& atom : strategy.per_player_type[player][t]) {
            Draw nd = d;
            nd.prob *= atom.prob;
            nd.bids.push_back(atom.bid);
            next.push_back(std::move(nd));
          }
          continue;
        }
        const auto& opp = game.players[j];
        for (std::size_t u = 0; u < opp.type_values.size(); ++u) {
          for (const auto& atom : strategy.per_player_type[j][u]) {
            Draw nd = d;
            nd.prob *= opp.type_probs[u] * atom.prob;
            nd.bids.push_back(atom.bid);
            next.push_back(std::move(nd));
          }
        }
      }
      draws = std::move(next);
    }
    for (const auto& d : draws) {
      if (d.prob <= 0) continue;
      for (int j = 0; j < n; ++j) bids[j] = d.bids[j];
      value += weight * d.prob *
               detail::outcome_utility(game.mechanism, pl.models[t], player, bids);
    }
  }
  return {value, 0.0};
}

// ---------------------------------------------------------------------------
// Regret
// ---------------------------------------------------------------------------

struct RegretEntry {
  int player = 0;
  int type_index = 0;         // 0 for complete information
  double action = 0;          // bid (or primary support bid)
  double action_prob = 1.0;   // probability of the conditioning action
  double objective = 0;       // conditional objective of the candidate
  double best_deviation = 0;  // maximizing grid bid
  double gain = 0;            // best deviation objective - candidate objective
};

struct RegretReport {
  std::vector<RegretEntry> entries;
  double max_regret = 0;      // CE: max weighted gain; BNE: max interim gain
  double welfare = 0;         // social welfare of the candidate
};

namespace detail {

inline double lottery_objective(const Lottery& lottery, double gamma) {
  if (gamma == 0) return lottery.mean();
  return variance_adjusted(lottery, gamma);
}

}  // namespace detail

/// Social welfare of a correlated distribution: per-player (variance
/// adjusted, if gamma > 0) utility of the joint lottery plus expected
/// payments.
inline double candidate_welfare(const DiscretizedBayesianGame& game,
                                const CorrelatedDist& dist, double gamma = 0.0);

/// Correlated-equilibrium regret. For each support action the conditional
/// objective (expectation, or expectation minus gamma times the standard
/// deviation when gamma > 0) is compared against the best conditional
/// deviation on the bid grid. max_regret aggregates switch gains weighted by
/// the action probability, which is the quantity a no-internal-regret
/// learner drives to zero.
inline RegretReport ce_regret(const DiscretizedBayesianGame& game,
                              const CorrelatedDist& dist, double gamma = 0.0) {
  game.validate();
  dist.validate(game);
  detail::require_unbudgeted(game);
  if (!game.complete_info()) {
    throw std::invalid_argument("ce_regret requires a complete-information game");
  }
  const int n = game.n_players();
  const int m = game.n_bids();
  RegretReport report;
  for (int i = 0; i < n; ++i) {
    const auto& model = game.players[i].models[0];
    // group support by own action
    std::map<int, std::vector<const CorrelatedDist::Entry*>> by_action;
    for (const auto& e : dist.support) {
      if (e.prob > 0) by_action[e.profile[i]].push_back(&e);
    }
    double player_weighted = 0;
    for (const auto& [j, entries] : by_action) {
      double pj = 0;
      for (const auto* e : entries) pj += e->prob;
      std::vector<double> bids(n);
      auto objective_for = [&](int own_bid_index) {
        Lottery lottery;
        for (const auto* e : entries) {
          for (int q = 0; q < n; ++q) bids[q] = game.bid_grid[e->profile[q]];
          bids[i] = game.bid_grid[own_bid_index];
          detail::append_outcomes(game.mechanism, model, i, bids, e->prob / pj, lottery);
        }
        return detail::lottery_objective(lottery, gamma);
      };
      const double current = objective_for(j);
      double best = current;
      int best_k = j;
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        const double val = objective_for(k);
        if (val > best) {
          best = val;
          best_k = k;
        }
      }
      const double gain = best - current;
      report.entries.push_back(RegretEntry{i, 0, game.bid_grid[j], pj, current,
                                           game.bid_grid[best_k], gain});
      player_weighted = std::max(player_weighted, pj * gain);
    }
    report.max_regret = std::max(report.max_regret, player_weighted);
  }
  report.welfare = candidate_welfare(game, dist, gamma);
  return report;
}

/// Coarse (unconditional) regret: the best fixed grid bid against the joint
/// distribution versus the candidate's utility. Certifies coarse correlated
/// equilibria produced by external-regret learners.
inline RegretReport coarse_regret(const DiscretizedBayesianGame& game,
                                  const CorrelatedDist& dist, double gamma = 0.0) {
  game.validate();
  dist.validate(game);
  detail::require_unbudgeted(game);
  const int n = game.n_players();
  const int m = game.n_bids();
  RegretReport report;
  for (int i = 0; i < n; ++i) {
    const auto& model = game.players[i].models[0];
    std::vector<double> bids(n);
    auto objective_for = [&](std::optional<int> replace) {
      Lottery lottery;
      for (const auto& e : dist.support) {
        for (int q = 0; q < n; ++q) bids[q] = game.bid_grid[e.profile[q]];
        if (replace) bids[i] = game.bid_grid[*replace];
        detail::append_outcomes(game.mechanism, model, i, bids, e.prob, lottery);
      }
      return detail::lottery_objective(lottery, gamma);
    };
    const double current = objective_for(std::nullopt);
    double best = current;
    int best_k = -1;
    for (int k = 0; k < m; ++k) {
      const double val = objective_for(k);
      if (val > best) {
        best = val;
        best_k = k;
      }
    }
    const double gain = std::max(0.0, best - current);
    report.entries.push_back(RegretEntry{i, 0, 0.0, 1.0, current,
                                         best_k >= 0 ? game.bid_grid[best_k] : 0.0,
                                         gain});
    report.max_regret = std::max(report.max_regret, gain);
  }
  report.welfare = candidate_welfare(game, dist, gamma);
  return report;
}

inline double candidate_welfare(const DiscretizedBayesianGame& game,
                                const CorrelatedDist& dist, double gamma) {
  const int n = game.n_players();
  double welfare = 0;
  std::vector<double> bids(n);
  for (int i = 0; i < n; ++i) {
    const auto& model = game.players[i].models[0];
    Lottery lottery;
    for (const auto& e : dist.support) {
      for (int q = 0; q < n; ++q) bids[q] = game.bid_grid[e.profile[q]];
      detail::append_outcomes(game.mechanism, model, i, bids, e.prob, lottery);
    }
    welfare += detail::lottery_objective(lottery, gamma);
  }
  for (const auto& e : dist.support) {
    for (int q = 0; q < n; ++q) bids[q] = game.bid_grid[e.profile[q]];
    for (int i = 0; i < n; ++i) {
      welfare += e.prob * detail::outcome_payment(game.mechanism, i, bids);
    }
  }
  return welfare;
}

/// Bayes-Nash regret of a strategy profile: for every (player, type) the
/// interim objective of the candidate bid is compared with the best grid
/// deviation; max_regret is the worst interim gain (not probability
/// weighted). Candidate bids may be off-grid.
inline RegretReport bne_regret(const DiscretizedBayesianGame& game,
                               const BayesStrategy& strategy, double gamma = 0.0) {
  game.validate();
  detail::require_unbudgeted(game);
  const int n = game.n_players();
  if (static_cast<int>(strategy.per_player_type.size()) != n) {
    throw std::invalid_argument("bne_regret: strategy arity mismatch");
  }
  RegretReport report;
  // enumerate opponents' (type, atom) combinations once per player
  for (int i = 0; i < n; ++i) {
    const auto& pl = game.players[i];
    if (strategy.per_player_type[i].size() != pl.type_values.size()) {
      throw std::invalid_argument("bne_regret: strategy missing types");
    }
    struct OppDraw {
      double prob;
      std::vector<double> bids;  // bid per opponent slot
    };
    std::vector<OppDraw> draws{{1.0, {}}};
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      std::vector<OppDraw> next;
      for (const auto& d : draws) {
        const auto& opp = game.players[j];
        for (std::size_t t = 0; t < opp.type_values.size(); ++t) {
          for (const auto& atom : strategy.per_player_type[j][t]) {
            OppDraw nd = d;
            nd.prob *= opp.type_probs[t] * atom.prob;
            nd.bids.push_back(atom.bid);
            next.push_back(std::move(nd));
          }
        }
      }
      draws = std::move(next);
    }
    for (std::size_t t = 0; t < pl.type_values.size(); ++t) {
      const auto& model = pl.models[t];
      std::vector<double> bids(n);
      auto objective_for = [&](const std::vector<BidAtom>& own_atoms) {
        Lottery lottery;
        for (const auto& atom : own_atoms) {
          for (const auto& d : draws) {
            if (d.prob <= 0) continue;
            int slot = 0;
            for (int j = 0; j < n; ++j) {
              bids[j] = (j == i) ? atom.bid : d.bids[slot++];
            }
            detail::append_outcomes(game.mechanism, model, i, bids,
                                    atom.prob * d.prob, lottery);
          }
        }
        return detail::lottery_objective(lottery, gamma);
      };
      const auto& own = strategy.per_player_type[i][t];
      const double current = objective_for(own);
      double best = current;
      double best_bid = own.front().bid;
      for (int k = 0; k < game.n_bids(); ++k) {
        const double val = objective_for({BidAtom{game.bid_grid[k], 1.0}});
        if (val > best) {
          best = val;
          best_bid = game.bid_grid[k];
        }
      }
      const double gain = std::max(0.0, best - current);
      report.entries.push_back(RegretEntry{i, static_cast<int>(t), own.front().bid,
                                           pl.type_probs[t], current, best_bid, gain});
      report.max_regret = std::max(report.max_regret, gain);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// No-regret learning
// ---------------------------------------------------------------------------

namespace detail {

/// Exact expected payoffs for every (player, joint profile), cached as flat
/// tensors when the joint space is small enough.
class PayoffEvaluator {
 public:
  explicit PayoffEvaluator(const DiscretizedBayesianGame& game,
                           std::size_t cache_limit = (1u << 22)) : game_(&game) {
    const int n = game.n_players();
    const int m = game.n_bids();
    std::size_t joint = 1;
    for (int i = 0; i < n; ++i) {
      joint *= static_cast<std::size_t>(m);
      if (joint > cache_limit) break;
    }
    cached_ = joint <= cache_limit;
    if (!cached_) return;
    utils_.assign(static_cast<std::size_t>(n), std::vector<double>(joint, 0.0));
    pays_.assign(static_cast<std::size_t>(n), std::vector<double>(joint, 0.0));
    std::vector<int> profile(n, 0);
    std::vector<double> bids(n, 0.0);
    for (std::size_t code = 0; code < joint; ++code) {
      std::size_t rest = code;
      for (int q = 0; q < n; ++q) {
        profile[q] = static_cast<int>(rest % m);
        bids[q] = game.bid_grid[profile[q]];
        rest /= m;
      }
      for (int i = 0; i < n; ++i) {
        utils_[i][code] =
            outcome_utility(game.mechanism, game.players[i].models[0], i, bids);
        pays_[i][code] = outcome_payment(game.mechanism, i, bids);
      }
    }
  }

  bool cached() const { return cached_; }

  std::size_t encode(std::span<const int> profile) const {
    std::size_t code = 0;
    for (int q = game_->n_players() - 1; q >= 0; --q) {
      code = code * static_cast<std::size_t>(game_->n_bids()) +
             static_cast<std::size_t>(profile[q]);
    }
    return code;
  }

  double utility(int player, std::span<const int> profile) const {
    if (cached_) return utils_[player][encode(profile)];
    return slow_utility(player, profile);
  }

  double payment(int player, std::span<const int> profile) const {
    if (cached_) return pays_[player][encode(profile)];
    std::vector<double> bids(game_->n_players());
    for (int q = 0; q < game_->n_players(); ++q) bids[q] = game_->bid_grid[profile[q]];
    return outcome_payment(game_->mechanism, player, bids);
  }

  /// Utility range of a player (for learner step sizes).
  std::pair<double, double> utility_range(int player) const {
    if (cached_) {
      const auto [lo, hi] =
          std::minmax_element(utils_[player].begin(), utils_[player].end());
      return {*lo, *hi};
    }
    // conservative bound from the extremes of the grid
    const auto& model = game_->players[player].models[0];
    const double top_bid = game_->bid_grid.back();
    const double win_free = eval_utility(model, model.valuation(), 0.0).value();
    const double lose_top = eval_utility(model, 0.0, top_bid).value();
    const double win_top = eval_utility(model, model.valuation(), top_bid).value();
    return {std::min({lose_top, win_top, 0.0}), std::max({win_free, 0.0})};
  }

 private:
  double slow_utility(int player, std::span<const int> profile) const {
    std::vector<double> bids(game_->n_players());
    for (int q = 0; q < game_->n_players(); ++q) bids[q] = game_->bid_grid[profile[q]];
    return outcome_utility(game_->mechanism, game_->players[player].models[0], player,
                           bids);
  }

  const DiscretizedBayesianGame* game_;
  bool cached_ = false;
  std::vector<std::vector<double>> utils_, pays_;
};

}  // namespace detail

struct LearnResult {
  CorrelatedDist empirical;
  std::vector<double> regret_trace;            // sampled average-regret curve
  double final_regret = 0;                     // learner's own regret bound at T
  std::vector<std::vector<double>> mixtures;   // hedge: final mixed strategies
};

/// Internal regret matching (Hart & Mas-Colell). The empirical joint play
/// converges to the set of correlated equilibria; the returned distribution
/// is certified downstream by ce_regret.
inline LearnResult learn_regret_matching(const DiscretizedBayesianGame& game,
                                         std::int64_t iterations, std::uint64_t seed) {
  game.validate();
  detail::require_unbudgeted(game);
  if (!game.complete_info()) {
    throw std::invalid_argument("learning requires a complete-information game");
  }
  if (iterations <= 0) throw std::invalid_argument("iterations must be > 0");
  const int n = game.n_players();
  const int m = game.n_bids();
  detail::PayoffEvaluator payoff(game);
  Rng rng(seed);

  std::vector<std::vector<double>> cum_regret(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(m) * m, 0.0));
  std::vector<double> mu(n);
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = payoff.utility_range(i);
    mu[i] = 2.0 * static_cast<double>(m) * std::max(hi - lo, 1e-12);
  }

  std::vector<int> profile(n);
  for (int i = 0; i < n; ++i) profile[i] = static_cast<int>(rng.next_index(m));
  std::map<std::size_t, std::int64_t> counts;
  std::vector<double> trace;
  const std::int64_t trace_every = std::max<std::int64_t>(1, iterations / 200);
  std::vector<double> row(m);

  for (std::int64_t t = 1; t <= iterations; ++t) {
    ++counts[payoff.encode(profile)];
    // regret update against the realized profile
    for (int i = 0; i < n; ++i) {
      const int j = profile[i];
      const double u_cur = payoff.utility(i, profile);
      std::vector<int> probe = profile;
      for (int k = 0; k < m; ++k) {
        if (k == j) continue;
        probe[i] = k;
        cum_regret[i][static_cast<std::size_t>(j) * m + k] +=
            payoff.utility(i, probe) - u_cur;
      }
    }
    if (t % trace_every == 0 || t == iterations) {
      double worst = 0;
      for (int i = 0; i < n; ++i) {
        for (double r : cum_regret[i]) worst = std::max(worst, r);
      }
      trace.push_back(worst / static_cast<double>(t));
    }
    // next actions: switch probabilities proportional to positive average regret
    for (int i = 0; i < n; ++i) {
      const int j = profile[i];
      double stay = 1.0;
      double total = 0.0;
      for (int k = 0; k < m; ++k) {
        const double r = k == j ? 0.0
                               : std::max(0.0, cum_regret[i][static_cast<std::size_t>(j) * m + k]) /
                                     (static_cast<double>(t) * mu[i]);
        row[k] = r;
        total += r;
      }
      stay -= total;
      row[j] = stay;
      profile[i] = static_cast<int>(rng.sample_weighted(row, 1.0));
    }
  }

  LearnResult result;
  for (const auto& [code, cnt] : counts) {
    CorrelatedDist::Entry e;
    e.profile.resize(n);
    std::size_t rest = code;
    for (int q = 0; q < n; ++q) {
      e.profile[q] = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    e.prob = static_cast<double>(cnt) / static_cast<double>(iterations);
    result.empirical.support.push_back(std::move(e));
  }
  result.regret_trace = std::move(trace);
  result.final_regret = result.regret_trace.empty() ? 0 : result.regret_trace.back();
  return result;
}

struct HedgeSchedule {
  bool anytime = true;   // eta_t = eta0 * sqrt(8 ln m / t) / range
  double eta0 = 1.0;     // fixed: eta_t = eta0 / range
};

/// Multiplicative-weights (Hedge) self-play with full-information feedback
/// against sampled opponent actions. External regret vanishes, so the
/// empirical joint play approaches a coarse correlated equilibrium.
inline LearnResult learn_hedge(const DiscretizedBayesianGame& game,
                               std::int64_t iterations, const HedgeSchedule& schedule,
                               std::uint64_t seed) {
  game.validate();
  detail::require_unbudgeted(game);
  if (!game.complete_info()) {
    throw std::invalid_argument("learning requires a complete-information game");
  }
  if (iterations <= 0) throw std::invalid_argument("iterations must be > 0");
  const int n = game.n_players();
  const int m = game.n_bids();
  detail::PayoffEvaluator payoff(game);
  Rng rng(seed);

  std::vector<std::vector<double>> score(static_cast<std::size_t>(n),
                                         std::vector<double>(m, 0.0));
  std::vector<double> realized(n, 0.0);
  std::vector<double> range(n);
  for (int i = 0; i < n; ++i) {
    const auto [lo, hi] = payoff.utility_range(i);
    range[i] = std::max(hi - lo, 1e-12);
  }
  const double logm = std::log(std::max(2, m));

  std::vector<int> profile(n, 0);
  std::map<std::size_t, std::int64_t> counts;
  std::vector<double> trace;
  const std::int64_t trace_every = std::max<std::int64_t>(1, iterations / 200);
  std::vector<double> weights(m);

  for (std::int64_t t = 1; t <= iterations; ++t) {
    for (int i = 0; i < n; ++i) {
      const double eta =
          schedule.anytime
              ? schedule.eta0 * std::sqrt(8.0 * logm / static_cast<double>(t)) / range[i]
              : schedule.eta0 / range[i];
      const double top = *std::max_element(score[i].begin(), score[i].end());
      double total = 0;
      for (int k = 0; k < m; ++k) {
        weights[k] = std::exp(eta * (score[i][k] - top));
        total += weights[k];
      }
      profile[i] = static_cast<int>(rng.sample_weighted(weights, total));
    }
    ++counts[payoff.encode(profile)];
    std::vector<int> probe = profile;
    for (int i = 0; i < n; ++i) {
      realized[i] += payoff.utility(i, profile);
      probe = profile;
      for (int k = 0; k < m; ++k) {
        probe[i] = k;
        score[i][k] += payoff.utility(i, probe);
      }
    }
    if (t % trace_every == 0 || t == iterations) {
      double worst = 0;
      for (int i = 0; i < n; ++i) {
        const double best = *std::max_element(score[i].begin(), score[i].end());
        worst = std::max(worst, (best - realized[i]) / static_cast<double>(t));
      }
      trace.push_back(worst);
    }
  }

  LearnResult result;
  for (const auto& [code, cnt] : counts) {
    CorrelatedDist::Entry e;
    e.profile.resize(n);
    std::size_t rest = code;
    for (int q = 0; q < n; ++q) {
      e.profile[q] = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    e.prob = static_cast<double>(cnt) / static_cast<double>(iterations);
    result.empirical.support.push_back(std::move(e));
  }
  result.regret_trace = std::move(trace);
  result.final_regret = result.regret_trace.empty() ? 0 : result.regret_trace.back();
  result.mixtures.assign(static_cast<std::size_t>(n), std::vector<double>(m, 0.0));
  for (int i = 0; i < n; ++i) {
    const double eta = schedule.anytime
                           ? schedule.eta0 * std::sqrt(8.0 * logm /
                                                       static_cast<double>(iterations)) /
                                 range[i]
                           : schedule.eta0 / range[i];
    const double top = *std::max_element(score[i].begin(), score[i].end());
    double total = 0;
    for (int k = 0; k < m; ++k) {
      result.mixtures[i][k] = std::exp(eta * (score[i][k] - top));
      total += result.mixtures[i][k];
    }
    for (int k = 0; k < m; ++k) result.mixtures[i][k] /= total;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Empirical price of anarchy
// ---------------------------------------------------------------------------

enum class LearnerKind { kRegretMatching, kHedge };
enum class FamilyUtility { kQuasilinear, kExponential, kPiecewise };

/// A family of random single-item instances: iid uniform valuations and one
/// utility shape shared by all players.
struct GameFamily {
  MechanismKind mechanism = MechanismKind::kFirstPrice;
  TieBreak tie_break = TieBreak::kUniformRandom;
  int n_players = 3;
  double v_min = 0.2;
  double v_max = 1.0;
  FamilyUtility utility = FamilyUtility::kQuasilinear;
  double piecewise_slope = 1.0;
  int bid_points = 21;
};

inline UtilityModel family_model(const GameFamily& family, double value) {
  switch (family.utility) {
    case FamilyUtility::kQuasilinear:
      return UtilityModel::quasilinear(value);
    case FamilyUtility::kExponential:
      return UtilityModel::scaled_risk_averse(value, ConcaveTransform::exponential());
    case FamilyUtility::kPiecewise:
      return UtilityModel::scaled_risk_averse(
          value, ConcaveTransform::piecewise_linear(family.piecewise_slope));
  }
  throw std::logic_error("unknown family utility");
}

inline DiscretizedBayesianGame family_instance(const GameFamily& family, Rng& rng) {
  std::vector<UtilityModel> models;
  for (int i = 0; i < family.n_players; ++i) {
    models.push_back(family_model(family, rng.uniform(family.v_min, family.v_max)));
  }
  std::vector<double> grid(family.bid_points);
  double vmax = 0;
  for (const auto& mdl : models) vmax = std::max(vmax, mdl.valuation());
  for (int k = 0; k < family.bid_points; ++k) {
    grid[k] = vmax * static_cast<double>(k) / (family.bid_points - 1);
  }
  MechanismSpec mech{family.mechanism, family.tie_break, family.n_players};
  return complete_info_game(mech, std::move(grid), std::move(models));
}

struct PoaRow {
  int instance = 0;
  std::uint64_t seed = 0;
  double opt_hat = 0;
  double opt = 0;
  double sw_eq = 0;
  double ratio = 0;
  double regret = 0;
  bool certified = false;
  bool smoothness_welfare_ok = true;  // lambda/max(1,mu) OPT-hat - eps n check
};

struct PoaSweep {
  std::vector<PoaRow> rows;
  double worst_ratio = 0;   // over certified rows only
  int certified_count = 0;
};

/// Runs a learner on n random instances, certifies each output, and reports
/// OPT-hat, OPT, equilibrium welfare, and the worst certified PoA ratio.
/// Uncertified runs stay in the table but are excluded from the ratio.
inline PoaSweep empirical_poa(const GameFamily& family, LearnerKind learner,
                              int n_instances, std::int64_t iterations,
                              std::uint64_t seed, double certify_bound_frac = 0.02,
                              int payment_points = 512,
                              std::optional<std::pair<double, double>>
                                  smooth_params = std::nullopt) {
  if (n_instances <= 0) throw std::invalid_argument("n_instances must be > 0");
  PoaSweep sweep;
  Rng master(seed);
  for (int idx = 0; idx < n_instances; ++idx) {
    const std::uint64_t run_seed = master.next_u64();
    Rng inst_rng(run_seed);
    const DiscretizedBayesianGame game = family_instance(family, inst_rng);
    const LearnResult learned =
        learner == LearnerKind::kRegretMatching
            ? learn_regret_matching(game, iterations, run_seed + 1)
            : learn_hedge(game, iterations, HedgeSchedule{}, run_seed + 1);
    const RegretReport certification =
        learner == LearnerKind::kRegretMatching
            ? ce_regret(game, learned.empirical)
            : coarse_regret(game, learned.empirical);
    std::vector<UtilityModel> models;
    for (const auto& pl : game.players) models.push_back(pl.models[0]);
    const auto allocations = single_item_allocations(models);
    const double opt_hat = optimal_value_welfare(allocations);
    const double opt = optimal_welfare(models, allocations, payment_points).value;
    double vmax = 0;
    for (const auto& mdl : models) vmax = std::max(vmax, mdl.valuation());
    PoaRow row;
    row.instance = idx;
    row.seed = run_seed;
    row.opt_hat = opt_hat;
    row.opt = opt;
    row.sw_eq = certification.welfare;
    row.regret = certification.max_regret;
    row.certified = certification.max_regret <= certify_bound_frac * vmax;
    row.ratio = row.sw_eq > 0 ? row.opt / row.sw_eq : kInf;
    if (row.certified) {
      sweep.worst_ratio = std::max(sweep.worst_ratio, row.ratio);
      ++sweep.certified_count;
      if (smooth_params) {
        // every certified equilibrium of a certified-smooth mechanism must
        // clear the smoothness welfare guarantee at grid scale
        const double lam = smooth_params->first, mu = smooth_params->second;
        const double floor = lam / std::max(1.0, mu) * opt_hat -
                             certification.max_regret * family.n_players;
        row.smoothness_welfare_ok = row.sw_eq >= floor - 1e-9;
      }
    }
    sweep.rows.push_back(row);
  }
  return sweep;
}

}  // namespace poalab
