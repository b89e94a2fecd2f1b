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

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "poalab/mechanisms.hpp"
#include "poalab/utility.hpp"

namespace poalab {

/// An allocation, reduced to the realized value v_i(x) per player.
struct Allocation {
  std::vector<double> value;
};

/// The outcome space of a single item: allocate to nobody or to one player at
/// their full valuation.
inline std::vector<Allocation> single_item_allocations(
    std::span<const UtilityModel> models) {
  std::vector<Allocation> out;
  const std::size_t n = models.size();
  out.push_back(Allocation{std::vector<double>(n, 0.0)});
  for (std::size_t i = 0; i < n; ++i) {
    Allocation a{std::vector<double>(n, 0.0)};
    a.value[i] = models[i].valuation();
    out.push_back(std::move(a));
  }
  return out;
}

/// Sum of utilities plus sum of payments; empty when any payment violates a
/// budget (the infeasible sentinel propagates, it is never a number).
inline std::optional<double> social_welfare(std::span<const UtilityModel> models,
                                            const OutcomeRecord& outcome) {
  if (models.size() != outcome.payments.size() ||
      models.size() != outcome.alloc.size()) {
    throw std::invalid_argument("social_welfare: arity mismatch");
  }
  double sw = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double vx = outcome.alloc[i] * models[i].valuation();
    const auto u = eval_utility(models[i], vx, outcome.payments[i]);
    if (!u) return std::nullopt;
    sw += *u + outcome.payments[i];
  }
  return sw;
}

/// Sum of realized values of an allocation.
inline double value_welfare(const Allocation& alloc) {
  double s = 0;
  for (double v : alloc.value) s += v;
  return s;
}

/// max_x sum_i v_i(x): the quasilinear optimum.
inline double optimal_value_welfare(std::span<const Allocation> allocations) {
  if (allocations.empty()) throw std::invalid_argument("empty outcome space");
  double best = -kInf;
  for (const auto& a : allocations) best = std::max(best, value_welfare(a));
  return best;
}

struct OptimalWelfare {
  double value = 0;
  std::size_t alloc_index = 0;
  std::vector<double> payments;
};

/// Exhaustive max of social welfare over the outcome space, with per-player
/// payments scanned on a uniform grid over [0, v_i(x)]. The search is
/// separable across players, so the grid max is exact up to grid resolution.
/// Restricting payments to [0, v_i(x)] is lossless for normalized models:
/// beyond v the summand u+p is at most v, which p=0 already attains.
inline OptimalWelfare optimal_welfare(std::span<const UtilityModel> models,
                                      std::span<const Allocation> allocations,
                                      int payment_points = 512) {
  if (allocations.empty()) throw std::invalid_argument("empty outcome space");
  if (payment_points < 2) throw std::invalid_argument("payment_points < 2");
  OptimalWelfare best;
  best.value = -kInf;
  for (std::size_t ai = 0; ai < allocations.size(); ++ai) {
    const auto& alloc = allocations[ai];
    if (alloc.value.size() != models.size()) {
      throw std::invalid_argument("allocation arity mismatch");
    }
    double total = 0;
    std::vector<double> pay(models.size(), 0.0);
    for (std::size_t i = 0; i < models.size(); ++i) {
      const double v = alloc.value[i];
      double hi = v;
      if (models[i].is_budgeted()) hi = std::min(hi, models[i].budget());
      double player_best = -kInf, player_best_p = 0;
      for (int k = 0; k < payment_points; ++k) {
        const double p = hi * static_cast<double>(k) / (payment_points - 1);
        const auto u = eval_utility(models[i], v, p);
        if (!u) continue;
        if (*u + p > player_best) {
          player_best = *u + p;
          player_best_p = p;
        }
      }
      total += player_best;
      pay[i] = player_best_p;
    }
    if (total > best.value) {
      best.value = total;
      best.alloc_index = ai;
      best.payments = std::move(pay);
    }
  }
  return best;
}

/// max_x,p sum_i min{u_i + p_i, B_i(x)}: the liquid (effective) welfare
/// benchmark for budgeted players.
inline OptimalWelfare liquid_welfare(std::span<const UtilityModel> models,
                                     std::span<const Allocation> allocations,
                                     int payment_points = 512) {
  if (allocations.empty()) throw std::invalid_argument("empty outcome space");
  OptimalWelfare best;
  best.value = -kInf;
  for (std::size_t ai = 0; ai < allocations.size(); ++ai) {
    const auto& alloc = allocations[ai];
    double total = 0;
    std::vector<double> pay(models.size(), 0.0);
    for (std::size_t i = 0; i < models.size(); ++i) {
      const double v = alloc.value[i];
      const double budget = models[i].is_budgeted() ? models[i].budget() : kInf;
      const double hi = std::min(v, budget);
      double player_best = -kInf, player_best_p = 0;
      for (int k = 0; k < payment_points; ++k) {
        const double p = hi * static_cast<double>(k) / (payment_points - 1);
        const auto u = eval_utility(models[i], v, p);
        if (!u) continue;
        const double capped = std::min(*u + p, budget);
        if (capped > player_best) {
          player_best = capped;
          player_best_p = p;
        }
      }
      total += player_best;
      pay[i] = player_best_p;
    }
    if (total > best.value) {
      best.value = total;
      best.alloc_index = ai;
      best.payments = std::move(pay);
    }
  }
  return best;
}

struct WelfareReport {
  double sw = 0;
  double value_welfare = 0;
  double opt = 0;
  double opt_hat = 0;
  std::optional<double> liquid_opt;
  bool infeasible = false;
};

/// All welfare figures of one realized outcome against the given outcome
/// space; liquid_opt is reported only when some player is budgeted.
inline WelfareReport make_welfare_report(std::span<const UtilityModel> models,
                                         const OutcomeRecord& outcome,
                                         std::span<const Allocation> allocations,
                                         int payment_points = 512) {
  WelfareReport report;
  const auto sw = social_welfare(models, outcome);
  report.infeasible = !sw.has_value();
  report.sw = sw.value_or(0.0);
  for (std::size_t i = 0; i < models.size(); ++i) {
    report.value_welfare += outcome.alloc[i] * models[i].valuation();
  }
  report.opt = optimal_welfare(models, allocations, payment_points).value;
  report.opt_hat = optimal_value_welfare(allocations);
  for (const auto& model : models) {
    if (model.is_budgeted()) {
      report.liquid_opt = liquid_welfare(models, allocations, payment_points).value;
      break;
    }
  }
  return report;
}

struct Lemma1Report {
  bool pass = true;
  double opt = 0;
  double opt_hat = 0;
};

/// OPT <= 2 * OPT-hat for normalized risk-averse utilities.
inline Lemma1Report check_lemma1(std::span<const UtilityModel> models,
                                 std::span<const Allocation> allocations,
                                 int payment_points = 512, double tol = 1e-9) {
  Lemma1Report report;
  report.opt = optimal_welfare(models, allocations, payment_points).value;
  report.opt_hat = optimal_value_welfare(allocations);
  report.pass = report.opt <= 2.0 * report.opt_hat + tol;
  return report;
}

}  // namespace poalab
