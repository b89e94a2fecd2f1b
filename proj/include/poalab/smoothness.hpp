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
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poalab/mechanisms.hpp"
#include "poalab/utility.hpp"
#include "poalab/welfare.hpp"

namespace poalab {

struct SmoothnessParams {
  double lambda = 0;
  double mu = 0;
};

struct WeakSmoothnessParams {
  double lambda = 0;
  double mu1 = 0;
  double mu2 = 0;
};

/// lambda / max{1, mu}: the efficiency guarantee of a smooth mechanism.
inline double poa_bound(const SmoothnessParams& p) {
  if (!(p.lambda > 0)) throw std::invalid_argument("poa_bound requires lambda > 0");
  return p.lambda / std::max(1.0, p.mu);
}

/// lambda / (mu2 + max{mu1, 1}): the weakly-smooth guarantee under
/// no-overbidding.
inline double weak_poa_bound(const WeakSmoothnessParams& p) {
  if (!(p.lambda > 0)) throw std::invalid_argument("weak_poa_bound requires lambda > 0");
  return p.lambda / (p.mu2 + std::max(1.0, p.mu1));
}

/// Quasilinear certificate -> normalized risk-averse certificate:
/// (lambda, mu) becomes (C*lambda/2, C*mu). C = 1 is the plain transfer;
/// C in (0,1) handles the relaxed normalization. Deliberately not
/// idempotent: applying it twice halves lambda again.
inline SmoothnessParams risk_transfer(const SmoothnessParams& p, double c = 1.0) {
  if (!(c > 0) || c > 1) throw std::invalid_argument("risk_transfer: C must be in (0,1]");
  return SmoothnessParams{c * p.lambda / 2.0, c * p.mu};
}

// ---------------------------------------------------------------------------
// Deviation generators
// ---------------------------------------------------------------------------

struct DeviationAtom {
  double bid = 0;
  double prob = 1.0;
};

/// One player's randomized deviation: either a finite support of bid atoms
/// or the uniform density on [0, width]. The uniform case is evaluated with
/// exact (closed-form or deterministic-quadrature) expectations; a finite
/// midpoint discretization of it would leak O(width / #atoms) certification
/// error against misaligned bid grids.
struct PlayerDeviation {
  std::vector<DeviationAtom> atoms;
  double uniform_width = 0;
  bool is_uniform() const { return uniform_width > 0; }
};

enum class DeviationKind { kHalfValueTopBidder, kTruthfulBid, kCustomTable };

/// Produces the randomized smoothness deviation per player for a value
/// profile. Deviations here do not depend on the player's current action, so
/// certificates extend to coarse correlated equilibria.
///
/// HalfValueTopBidder: the highest-value player bids uniformly on
/// [0, v_top] (mean bid v_top / 2), everyone else bids 0.
///
/// TruthfulBid: every player deviates to her value.
class DeviationGenerator {
 public:
  static DeviationGenerator half_value_top_bidder() {
    DeviationGenerator g;
    g.kind_ = DeviationKind::kHalfValueTopBidder;
    return g;
  }

  static DeviationGenerator truthful_bid() {
    DeviationGenerator g;
    g.kind_ = DeviationKind::kTruthfulBid;
    return g;
  }

  /// table[i] is the fixed deviation support of player i.
  static DeviationGenerator custom_table(std::vector<std::vector<DeviationAtom>> table) {
    DeviationGenerator g;
    g.kind_ = DeviationKind::kCustomTable;
    g.table_ = std::move(table);
    return g;
  }

  DeviationKind kind() const { return kind_; }

  std::vector<PlayerDeviation> deviations(std::span<const double> values) const {
    const std::size_t n = values.size();
    std::vector<PlayerDeviation> out(n);
    switch (kind_) {
      case DeviationKind::kHalfValueTopBidder: {
        std::size_t top = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (values[i] > values[top]) top = i;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (i == top && values[top] > 0) {
            out[i].uniform_width = values[top];
          } else {
            out[i].atoms.push_back(DeviationAtom{0.0, 1.0});
          }
        }
        break;
      }
      case DeviationKind::kTruthfulBid:
        for (std::size_t i = 0; i < n; ++i) {
          out[i].atoms.push_back(DeviationAtom{values[i], 1.0});
        }
        break;
      case DeviationKind::kCustomTable: {
        if (table_.size() != n) throw std::invalid_argument("custom table arity mismatch");
        for (std::size_t i = 0; i < n; ++i) out[i].atoms = table_[i];
        break;
      }
    }
    return out;
  }

 private:
  DeviationKind kind_ = DeviationKind::kHalfValueTopBidder;
  std::vector<std::vector<DeviationAtom>> table_;
};

// ---------------------------------------------------------------------------
// Certification instances
// ---------------------------------------------------------------------------

enum class Benchmark { kValueWelfare, kRiskAverseOpt, kLiquidWelfare };

/// A finite certification instance: a type-profile grid (product of per-player
/// value grids), a bid grid for current action profiles, and the utility
/// shape shared by all players (rebased per value).
struct SmoothnessInstance {
  MechanismSpec mechanism;
  std::vector<std::vector<double>> value_grids;
  std::vector<double> bid_grid;
  UtilityModel prototype = UtilityModel::quasilinear(0.0);
  std::vector<double> budgets;  // empty = no budgets

  void validate() const {
    if (static_cast<int>(value_grids.size()) != mechanism.n_players) {
      throw std::invalid_argument("instance: value grid arity mismatch");
    }
    if (bid_grid.empty()) throw std::invalid_argument("instance: empty bid grid");
    if (!budgets.empty() && static_cast<int>(budgets.size()) != mechanism.n_players) {
      throw std::invalid_argument("instance: budget arity mismatch");
    }
  }

  UtilityModel model_for(int player, double value) const {
    UtilityModel m = prototype.with_valuation(value);
    if (!budgets.empty()) m = UtilityModel::budgeted(m, budgets[player]);
    return m;
  }
};

struct Counterexample {
  std::vector<double> values;
  std::vector<double> bids;
  double lhs = 0;
  double rhs = 0;
};

struct Certificate {
  bool certified = true;
  double min_slack = kInf;
  std::optional<Counterexample> counterexample;
  std::size_t profiles_checked = 0;
  std::string note;
};

namespace detail {

/// How a deviation bid fares against the rest of a profile: the opponent max,
/// how many opponents sit at that max, and whether the deviating player wins
/// a tie under the instance's policy.
struct OppSummary {
  double max_bid = 0;
  int tied_at_max = 0;
  bool deviator_wins_tie = false;
};

inline OppSummary summarize_opponents(const MechanismSpec& mech,
                                      std::span<const double> bids, int player) {
  OppSummary s;
  s.max_bid = -1;
  int lowest_at_max = -1;
  for (int j = 0; j < static_cast<int>(bids.size()); ++j) {
    if (j == player) continue;
    if (bids[j] > s.max_bid) {
      s.max_bid = bids[j];
      s.tied_at_max = 1;
      lowest_at_max = j;
    } else if (bids[j] == s.max_bid) {
      ++s.tied_at_max;
      lowest_at_max = std::min(lowest_at_max, j);
    }
  }
  s.deviator_wins_tie = mech.tie_break == TieBreak::kLowestIndex
                            ? player < lowest_at_max
                            : false;  // uniform handled by the caller with 1/(k+1)
  return s;
}

/// Expected utility (under the given model and zero current bid) of deviating
/// to `bid` when the opponents' best bid is `opp`. `win_prob` covers the tie
/// cases.
inline double deviation_utility(const MechanismSpec& mech, const UtilityModel& model,
                                double bid, const OppSummary& opp) {
  double win_prob;
  if (bid > opp.max_bid) {
    win_prob = 1.0;
  } else if (bid < opp.max_bid) {
    win_prob = 0.0;
  } else if (mech.tie_break == TieBreak::kLowestIndex) {
    win_prob = opp.deviator_wins_tie ? 1.0 : 0.0;
  } else {
    win_prob = 1.0 / (1.0 + opp.tied_at_max);
  }
  double win_pay = 0, lose_pay = 0;
  switch (mech.kind) {
    case MechanismKind::kFirstPrice:
      win_pay = bid;
      break;
    case MechanismKind::kSecondPrice:
      win_pay = std::max(opp.max_bid, 0.0);
      break;
    case MechanismKind::kAllPay:
      win_pay = bid;
      lose_pay = bid;
      break;
    case MechanismKind::kTwoItemPreference:
      throw std::invalid_argument("smoothness certification covers auction kinds");
  }
  double u = 0;
  if (win_prob > 0) {
    const auto uw = eval_utility(model, model.valuation(), win_pay);
    u += win_prob * (uw ? *uw : -kInf);
  }
  if (win_prob < 1) {
    const auto ul = eval_utility(model, 0.0, lose_pay);
    u += (1 - win_prob) * (ul ? *ul : -kInf);
  }
  return u;
}

/// Expected utility of a whole player deviation against an opponent summary.
/// Finite supports sum atom terms; the uniform density integrates its win and
/// lose branches exactly (quasilinear branches in closed form, transformed
/// models by deterministic quadrature; ties under a density have measure
/// zero).
inline double expected_deviation_utility(const MechanismSpec& mech,
                                         const UtilityModel& model,
                                         const PlayerDeviation& dev,
                                         const OppSummary& opp) {
  if (!dev.is_uniform()) {
    double u = 0;
    for (const auto& atom : dev.atoms) {
      u += atom.prob * deviation_utility(mech, model, atom.bid, opp);
    }
    return u;
  }
  const double w = dev.uniform_width;
  const double v = model.valuation();
  const double m = std::max(opp.max_bid, 0.0);
  const double lo = std::min(m, w);  // losing bids live in [0, lo)
  const bool quasi = model.inner_variant() == UtilityVariant::kQuasilinear;
  if (model.is_budgeted()) {
    const double max_pay = mech.kind == MechanismKind::kSecondPrice ? lo : w;
    if (max_pay > model.budget() + 1e-15) return -kInf;  // sentinel-poisoned
  }
  double total = 0;
  switch (mech.kind) {
    case MechanismKind::kFirstPrice:
      if (lo < w) {
        total += quasi ? 0.5 * ((v - lo) * (v - lo) - (v - w) * (v - w))
                       : adaptive_simpson(
                             [&](double b) { return *eval_utility(model, v, b); },
                             lo, w, 1e-13 * std::max(1.0, v));
      }
      break;  // losing pays nothing and yields zero
    case MechanismKind::kSecondPrice:
      if (lo < w) total += (w - lo) * *eval_utility(model, v, m);
      break;
    case MechanismKind::kAllPay:
      if (lo < w) {
        total += quasi ? 0.5 * ((v - lo) * (v - lo) - (v - w) * (v - w))
                       : adaptive_simpson(
                             [&](double b) { return *eval_utility(model, v, b); },
                             lo, w, 1e-13 * std::max(1.0, v));
      }
      if (lo > 0) {
        total += quasi ? -0.5 * lo * lo
                       : adaptive_simpson(
                             [&](double b) { return *eval_utility(model, 0.0, b); },
                             0.0, lo, 1e-13 * std::max(1.0, v));
      }
      break;
    case MechanismKind::kTwoItemPreference:
      throw std::invalid_argument("smoothness certification covers auction kinds");
  }
  return total / w;
}

/// Expected total payment of a raw bid profile (tie policy cannot change the
/// revenue of the three auction formats).
inline double profile_revenue(const MechanismSpec& mech, std::span<const double> bids) {
  switch (mech.kind) {
    case MechanismKind::kFirstPrice:
      return *std::max_element(bids.begin(), bids.end());
    case MechanismKind::kSecondPrice: {
      double top = -1, second = 0;
      for (double b : bids) {
        if (b >= top) {
          second = top < 0 ? 0.0 : top;
          top = b;
        } else if (b > second) {
          second = b;
        }
      }
      return std::max(second, 0.0);
    }
    case MechanismKind::kAllPay: {
      double s = 0;
      for (double b : bids) s += b;
      return s;
    }
    case MechanismKind::kTwoItemPreference:
      return 0.0;
  }
  return 0.0;
}

template <typename Fn>
void for_each_profile(std::span<const std::vector<double>> grids, Fn&& fn) {
  const std::size_t n = grids.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> point(n);
  while (true) {
    for (std::size_t q = 0; q < n; ++q) point[q] = grids[q][idx[q]];
    fn(std::as_const(point));
    std::size_t pos = 0;
    for (; pos < n; ++pos) {
      if (++idx[pos] < grids[pos].size()) break;
      idx[pos] = 0;
    }
    if (pos == n) break;
  }
}

inline double benchmark_value(const SmoothnessInstance& inst, Benchmark benchmark,
                              std::span<const double> values, int payment_points) {
  std::vector<UtilityModel> models;
  for (int i = 0; i < inst.mechanism.n_players; ++i) {
    models.push_back(inst.model_for(i, values[i]));
  }
  const auto allocations = single_item_allocations(models);
  switch (benchmark) {
    case Benchmark::kValueWelfare:
      return optimal_value_welfare(allocations);
    case Benchmark::kRiskAverseOpt:
      return optimal_welfare(models, allocations, payment_points).value;
    case Benchmark::kLiquidWelfare:
      return liquid_welfare(models, allocations, payment_points).value;
  }
  return 0;
}

}  // namespace detail

/// Checks sum_i E[u_i(a*_i, a_-i)] >= lambda * OPT(theta) - mu * sum_i p_i(a)
/// at every (type profile, action profile) grid point. Returns the first
/// violation or a certificate with the minimal slack. The benchmark defaults
/// to the quasilinear optimum (value welfare).
inline Certificate certify_smoothness(const SmoothnessInstance& inst,
                                      const DeviationGenerator& dev,
                                      const SmoothnessParams& params,
                                      Benchmark benchmark = Benchmark::kValueWelfare,
                                      double tol = 1e-9, int payment_points = 512) {
  inst.validate();
  const int n = inst.mechanism.n_players;
  const int m = static_cast<int>(inst.bid_grid.size());
  Certificate cert;
  std::vector<std::vector<double>> bid_grids(n, inst.bid_grid);
  detail::for_each_profile(inst.value_grids, [&](const std::vector<double>& values) {
    if (!cert.certified) return;
    const double opt = detail::benchmark_value(inst, benchmark, values, payment_points);
    const auto devs = dev.deviations(values);
    std::vector<UtilityModel> models;
    for (int i = 0; i < n; ++i) models.push_back(inst.model_for(i, values[i]));
    // deviation-utility cache over (player, opp max index, tie count, tie win);
    // uniform deviations never tie (measure zero), so their key collapses
    std::vector<double> cache(static_cast<std::size_t>(n) * m * n * 2, kInf);
    auto dev_util = [&](int i, int m_idx, int kappa, bool wins_tie) {
      if (devs[i].is_uniform()) {
        kappa = 1;
        wins_tie = false;
      }
      double& slot = cache[((static_cast<std::size_t>(i) * m + m_idx) * n +
                            (kappa - 1)) * 2 + (wins_tie ? 1 : 0)];
      if (slot != kInf) return slot;
      detail::OppSummary opp;
      opp.max_bid = inst.bid_grid[m_idx];
      opp.tied_at_max = kappa;
      opp.deviator_wins_tie = wins_tie;
      slot = detail::expected_deviation_utility(inst.mechanism, models[i], devs[i], opp);
      return slot;
    };
    detail::for_each_profile(bid_grids, [&](const std::vector<double>& bids) {
      if (!cert.certified) return;
      ++cert.profiles_checked;
      double lhs = 0;
      for (int i = 0; i < n; ++i) {
        const auto opp = detail::summarize_opponents(inst.mechanism, bids, i);
        int m_idx = 0;
        for (int k = 0; k < m; ++k) {
          if (inst.bid_grid[k] == opp.max_bid) {
            m_idx = k;
            break;
          }
        }
        lhs += dev_util(i, m_idx, opp.tied_at_max, opp.deviator_wins_tie);
      }
      const double rhs =
          params.lambda * opt - params.mu * detail::profile_revenue(inst.mechanism, bids);
      const double slack = lhs - rhs;
      cert.min_slack = std::min(cert.min_slack, slack);
      if (slack < -tol) {
        cert.certified = false;
        cert.counterexample = Counterexample{values, bids, lhs, rhs};
      }
    });
  });
  return cert;
}

/// Weak smoothness: the right-hand side gains a -mu2 * sum_i W_i(a_i, X(a))
/// term, with willingness-to-pay taken over the instance's bid grid.
inline Certificate certify_weak_smoothness(const SmoothnessInstance& inst,
                                           const DeviationGenerator& dev,
                                           const WeakSmoothnessParams& params,
                                           Benchmark benchmark = Benchmark::kValueWelfare,
                                           double tol = 1e-9, int payment_points = 512) {
  inst.validate();
  const int n = inst.mechanism.n_players;
  const int m = static_cast<int>(inst.bid_grid.size());
  // willingness-to-pay table over (player, bid index, allocated)
  std::vector<std::vector<std::array<double, 2>>> wtp(
      n, std::vector<std::array<double, 2>>(m));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) {
      for (bool allocated : {false, true}) {
        double w = 0;
        try {
          w = willingness_to_pay(inst.mechanism, i, inst.bid_grid[k], allocated,
                                 inst.bid_grid);
        } catch (const std::domain_error&) {
          w = 0;  // unreachable allocation contributes nothing
        }
        wtp[i][k][allocated ? 1 : 0] = w;
      }
    }
  }
  Certificate cert;
  std::vector<std::vector<double>> bid_grids(n, inst.bid_grid);
  detail::for_each_profile(inst.value_grids, [&](const std::vector<double>& values) {
    if (!cert.certified) return;
    const double opt = detail::benchmark_value(inst, benchmark, values, payment_points);
    const auto devs = dev.deviations(values);
    std::vector<UtilityModel> models;
    for (int i = 0; i < n; ++i) models.push_back(inst.model_for(i, values[i]));
    detail::for_each_profile(bid_grids, [&](const std::vector<double>& bids) {
      if (!cert.certified) return;
      ++cert.profiles_checked;
      double lhs = 0;
      for (int i = 0; i < n; ++i) {
        const auto opp = detail::summarize_opponents(inst.mechanism, bids, i);
        lhs += detail::expected_deviation_utility(inst.mechanism, models[i], devs[i], opp);
      }
      // E[sum_i W_i(a_i, X(a))] over tie-break realizations
      double wsum = 0;
      std::vector<int> bid_index(n, 0);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
          if (inst.bid_grid[k] == bids[i]) {
            bid_index[i] = k;
            break;
          }
        }
      }
      for (const auto& [outcome, prob] : run_mechanism_exhaustive(inst.mechanism, bids)) {
        for (int i = 0; i < n; ++i) {
          wsum += prob * wtp[i][bid_index[i]][outcome.winner == i ? 1 : 0];
        }
      }
      const double rhs = params.lambda * opt -
                         params.mu1 * detail::profile_revenue(inst.mechanism, bids) -
                         params.mu2 * wsum;
      const double slack = lhs - rhs;
      cert.min_slack = std::min(cert.min_slack, slack);
      if (slack < -tol) {
        cert.certified = false;
        cert.counterexample = Counterexample{values, bids, lhs, rhs};
      }
    });
  });
  return cert;
}

struct NonnegDeviationViolation {
  std::vector<double> values;
  int player = -1;
  double deviation_bid = 0;
  double opponent_max = 0;
  double utility = 0;
};

struct NonnegDeviationReport {
  bool pass = true;
  std::optional<NonnegDeviationViolation> violation;
};

/// The transfer hypothesis: every support bid of the smoothness deviation has
/// non-negative quasilinear utility against every opponent profile (and every
/// tie-break realization). Opponent profiles are characterized exactly by
/// their max bid, the tie count, and the tie outcome.
inline NonnegDeviationReport check_nonneg_deviation_utility(
    const SmoothnessInstance& inst, const DeviationGenerator& dev, double tol = 1e-12) {
  inst.validate();
  const int n = inst.mechanism.n_players;
  NonnegDeviationReport report;
  auto worst_case = [&](double bid, double value, double opp_max) {
    // worst quasilinear utility of this support bid over realizations
    double worst = kInf;
    const bool can_win = bid >= opp_max;
    const bool can_lose = bid <= opp_max;
    if (can_win) {
      double pay = 0;
      switch (inst.mechanism.kind) {
        case MechanismKind::kFirstPrice:
        case MechanismKind::kAllPay:
          pay = bid;
          break;
        case MechanismKind::kSecondPrice:
          pay = opp_max;
          break;
        default:
          break;
      }
      worst = std::min(worst, value - pay);
    }
    if (can_lose) {
      const double pay = inst.mechanism.kind == MechanismKind::kAllPay ? bid : 0.0;
      worst = std::min(worst, -pay);
    }
    return worst;
  };
  detail::for_each_profile(inst.value_grids, [&](const std::vector<double>& values) {
    if (!report.pass) return;
    const auto devs = dev.deviations(values);
    for (int i = 0; i < n && report.pass; ++i) {
      // a uniform deviation's support is the whole interval [0, width]; its
      // worst bid against a given opponent max is one of the interval ends
      // or the opponent max itself
      std::vector<DeviationAtom> support = devs[i].atoms;
      for (double opp_max : inst.bid_grid) {
        if (devs[i].is_uniform()) {
          const double w = devs[i].uniform_width;
          support = {{0.0, 1.0}, {w, 1.0}, {std::min(w, opp_max), 1.0}};
        }
        for (const auto& atom : support) {
          const double worst = worst_case(atom.bid, values[i], opp_max);
          if (worst < -tol) {
            report.pass = false;
            report.violation =
                NonnegDeviationViolation{values, i, atom.bid, opp_max, worst};
            break;
          }
        }
        if (!report.pass) break;
      }
    }
  });
  return report;
}

/// Budget transfer: certifies the (lambda/2, mu) inequality for budgeted
/// risk-averse players against the liquid-welfare benchmark, with deviations
/// generated from budget-capped valuations. Fails up-front when the
/// non-negative-deviation hypothesis is violated (all-pay).
inline Certificate budget_transfer_check(const SmoothnessInstance& inst,
                                         const DeviationGenerator& dev,
                                         const SmoothnessParams& params,
                                         double tol = 1e-9, int payment_points = 512) {
  inst.validate();
  if (inst.budgets.empty()) {
    throw std::invalid_argument("budget_transfer_check requires budgets");
  }
  const int n = inst.mechanism.n_players;
  // capped value grids drive the deviations and the structural check
  SmoothnessInstance capped = inst;
  capped.budgets.clear();
  for (int i = 0; i < n; ++i) {
    for (auto& v : capped.value_grids[i]) v = cap_valuation(v, inst.budgets[i]);
  }
  const auto nonneg = check_nonneg_deviation_utility(capped, dev);
  if (!nonneg.pass) {
    Certificate cert;
    cert.certified = false;
    cert.min_slack = -kInf;
    cert.note = "non-negative deviation utility hypothesis fails";
    return cert;
  }

  const int m = static_cast<int>(inst.bid_grid.size());
  Certificate cert;
  std::vector<std::vector<double>> bid_grids(n, inst.bid_grid);
  detail::for_each_profile(inst.value_grids, [&](const std::vector<double>& values) {
    if (!cert.certified) return;
    std::vector<double> capped_values(values.size());
    for (int i = 0; i < n; ++i) capped_values[i] = cap_valuation(values[i], inst.budgets[i]);
    const auto devs = dev.deviations(capped_values);
    std::vector<UtilityModel> models;
    for (int i = 0; i < n; ++i) models.push_back(inst.model_for(i, values[i]));
    const double liquid = detail::benchmark_value(inst, Benchmark::kLiquidWelfare,
                                                  values, payment_points);
    std::vector<double> cache(static_cast<std::size_t>(n) * m * n * 2, kInf);
    auto dev_util = [&](int i, int m_idx, int kappa, bool wins_tie) {
      if (devs[i].is_uniform()) {
        kappa = 1;
        wins_tie = false;
      }
      double& slot = cache[((static_cast<std::size_t>(i) * m + m_idx) * n +
                            (kappa - 1)) * 2 + (wins_tie ? 1 : 0)];
      if (slot != kInf) return slot;
      detail::OppSummary opp;
      opp.max_bid = inst.bid_grid[m_idx];
      opp.tied_at_max = kappa;
      opp.deviator_wins_tie = wins_tie;
      slot = detail::expected_deviation_utility(inst.mechanism, models[i], devs[i], opp);
      return slot;
    };
    detail::for_each_profile(bid_grids, [&](const std::vector<double>& bids) {
      if (!cert.certified) return;
      ++cert.profiles_checked;
      double lhs = 0;
      for (int i = 0; i < n; ++i) {
        const auto opp = detail::summarize_opponents(inst.mechanism, bids, i);
        int m_idx = 0;
        for (int k = 0; k < m; ++k) {
          if (inst.bid_grid[k] == opp.max_bid) {
            m_idx = k;
            break;
          }
        }
        lhs += dev_util(i, m_idx, opp.tied_at_max, opp.deviator_wins_tie);
      }
      const double rhs = 0.5 * params.lambda * liquid -
                         params.mu * detail::profile_revenue(inst.mechanism, bids);
      const double slack = lhs - rhs;
      cert.min_slack = std::min(cert.min_slack, slack);
      if (slack < -tol) {
        cert.certified = false;
        cert.counterexample = Counterexample{values, bids, lhs, rhs};
      }
    });
  });
  return cert;
}

}  // namespace poalab
