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

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "poalab/numeric.hpp"

namespace poalab {

enum class TransformKind { kLinear, kExponential, kPiecewiseLinear, kTabulated };

/// Concave non-decreasing bending function h applied to the quasilinear term.
///
/// Supported shapes:
///   linear          h(x) = x
///   exponential     h(x) = 1 - e^{-x}
///   piecewise       h(x) = x for x >= 0, C*x for x < 0  (C >= 1)
///   tabulated       monotone piecewise-linear interpolation of (x, h(x)) knots
class ConcaveTransform {
 public:
  static ConcaveTransform linear() { return ConcaveTransform(TransformKind::kLinear); }
  static ConcaveTransform exponential() {
    return ConcaveTransform(TransformKind::kExponential);
  }
  static ConcaveTransform piecewise_linear(double slope_below_zero) {
    if (!(slope_below_zero >= 1.0)) {
      throw std::invalid_argument("piecewise transform requires slope C >= 1");
    }
    ConcaveTransform t(TransformKind::kPiecewiseLinear);
    t.slope_ = slope_below_zero;
    return t;
  }
  static ConcaveTransform tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size()) {
      throw std::invalid_argument("tabulated transform needs >= 2 knots");
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (!(xs[i + 1] > xs[i])) {
        throw std::invalid_argument("tabulated knots must be strictly increasing in x");
      }
      if (ys[i + 1] < ys[i]) {
        throw std::invalid_argument("tabulated transform must be non-decreasing");
      }
    }
    ConcaveTransform t(TransformKind::kTabulated);
    t.knot_x_ = std::move(xs);
    t.knot_y_ = std::move(ys);
    return t;
  }

  TransformKind kind() const { return kind_; }

  double operator()(double x) const {
    switch (kind_) {
      case TransformKind::kLinear:
        return x;
      case TransformKind::kExponential:
        return -std::expm1(-x);
      case TransformKind::kPiecewiseLinear:
        return x >= 0 ? x : slope_ * x;
      case TransformKind::kTabulated:
        return eval_table(x);
    }
    return x;  // unreachable
  }

  /// Slope of h just below zero; used by the optional zero-value convention.
  double left_slope_at_zero() const {
    switch (kind_) {
      case TransformKind::kLinear:
        return 1.0;
      case TransformKind::kExponential:
        return 1.0;
      case TransformKind::kPiecewiseLinear:
        return slope_;
      case TransformKind::kTabulated: {
        const auto it = std::lower_bound(knot_x_.begin(), knot_x_.end(), 0.0);
        std::size_t i = it == knot_x_.begin()
                            ? 0
                            : static_cast<std::size_t>(it - knot_x_.begin()) - 1;
        if (i + 1 >= knot_x_.size()) i = knot_x_.size() - 2;
        return (knot_y_[i + 1] - knot_y_[i]) / (knot_x_[i + 1] - knot_x_[i]);
      }
    }
    return 1.0;  // unreachable
  }

  double piecewise_slope() const { return slope_; }

 private:
  explicit ConcaveTransform(TransformKind kind) : kind_(kind) {}

  // Piecewise-linear interpolation, extended past the end knots with the
  // boundary segment slopes so monotonicity is preserved.
  double eval_table(double x) const {
    const std::size_t n = knot_x_.size();
    if (x <= knot_x_.front()) {
      const double s = (knot_y_[1] - knot_y_[0]) / (knot_x_[1] - knot_x_[0]);
      return knot_y_.front() + s * (x - knot_x_.front());
    }
    if (x >= knot_x_.back()) {
      const double s =
          (knot_y_[n - 1] - knot_y_[n - 2]) / (knot_x_[n - 1] - knot_x_[n - 2]);
      return knot_y_.back() + s * (x - knot_x_.back());
    }
    const auto it = std::upper_bound(knot_x_.begin(), knot_x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - knot_x_.begin()) - 1;
    const double t = (x - knot_x_[i]) / (knot_x_[i + 1] - knot_x_[i]);
    return knot_y_[i] + t * (knot_y_[i + 1] - knot_y_[i]);
  }

  TransformKind kind_;
  double slope_ = 1.0;
  std::vector<double> knot_x_, knot_y_;
};

enum class UtilityVariant { kQuasilinear, kScaledRiskAverse, kBudgeted };

/// A player's utility over (realized allocation value, payment).
///
/// Quasilinear:       u = v(x) - p
/// ScaledRiskAverse:  u = h(v(x) - p) * v / h(v), where v is the player's
///                    valuation (so the winning branch is h(v-p) v / h(v) and
///                    the losing branch is h(-p) v / h(v))
/// Budgeted:          inner utility if p <= B, otherwise infeasible
///                    (represented as an empty optional, never a number)
class UtilityModel {
 public:
  static UtilityModel quasilinear(double valuation) {
    UtilityModel m;
    m.variant_ = UtilityVariant::kQuasilinear;
    m.valuation_ = valuation;
    return m;
  }

  static UtilityModel scaled_risk_averse(double valuation, ConcaveTransform h) {
    if (valuation < 0) throw std::invalid_argument("valuation must be >= 0");
    UtilityModel m;
    m.variant_ = UtilityVariant::kScaledRiskAverse;
    m.valuation_ = valuation;
    m.transform_ = std::move(h);
    return m;
  }

  static UtilityModel budgeted(UtilityModel inner, double budget) {
    if (inner.variant_ == UtilityVariant::kBudgeted) {
      throw std::invalid_argument("budgeted models do not nest");
    }
    if (budget < 0) throw std::invalid_argument("budget must be >= 0");
    inner.budget_ = budget;
    inner.budgeted_ = true;
    return inner;
  }

  UtilityVariant variant() const {
    return budgeted_ ? UtilityVariant::kBudgeted : variant_;
  }
  UtilityVariant inner_variant() const { return variant_; }
  bool is_budgeted() const { return budgeted_; }
  double budget() const { return budget_; }
  double valuation() const { return valuation_; }
  const ConcaveTransform& transform() const { return transform_; }

  UtilityModel with_valuation(double v) const {
    UtilityModel m = *this;
    m.valuation_ = v;
    return m;
  }

  /// Enables u = -p * (left slope of h at 0) when the valuation is zero.
  /// Off by default: a zero-valuation risk-averse model with p != 0 is a
  /// domain error.
  UtilityModel with_zero_value_convention() const {
    UtilityModel m = *this;
    m.zero_value_convention_ = true;
    return m;
  }
  bool zero_value_convention() const { return zero_value_convention_; }

 private:
  UtilityModel() : transform_(ConcaveTransform::linear()) {}

  UtilityVariant variant_ = UtilityVariant::kQuasilinear;
  double valuation_ = 0.0;
  ConcaveTransform transform_;
  bool budgeted_ = false;
  double budget_ = kInf;
  bool zero_value_convention_ = false;
};

/// Evaluates a model at (realized allocation value, payment). An empty
/// optional is the budget-infeasible sentinel.
inline std::optional<double> eval_utility(const UtilityModel& model,
                                          double allocation_value, double payment) {
  if (!std::isfinite(payment)) throw std::invalid_argument("payment must be finite");
  if (model.is_budgeted() && payment > model.budget()) return std::nullopt;
  if (model.inner_variant() == UtilityVariant::kQuasilinear) {
    return allocation_value - payment;
  }
  const double v = model.valuation();
  if (v <= 0.0) {
    if (payment == 0.0) return allocation_value;
    if (model.zero_value_convention() && v == 0.0) {
      return -payment * model.transform().left_slope_at_zero();
    }
    throw std::domain_error(
        "scaled risk-averse model undefined for zero valuation with payment");
  }
  const auto& h = model.transform();
  const double hv = h(v);
  if (!(hv > 0.0)) throw std::domain_error("transform must satisfy h(v) > 0");
  return h(allocation_value - payment) * v / hv;
}

/// Quasilinear utility for the same (value, payment) pair, ignoring the
/// model's bending function but honouring its budget.
inline std::optional<double> eval_quasilinear(const UtilityModel& model,
                                              double allocation_value,
                                              double payment) {
  if (model.is_budgeted() && payment > model.budget()) return std::nullopt;
  return allocation_value - payment;
}

/// min{v(x), B(x)} pointwise.
inline double cap_valuation(double v, double budget) {
  if (v < 0 || budget < 0) throw std::invalid_argument("cap_valuation: negative input");
  return std::min(v, budget);
}

inline std::vector<double> cap_valuation(std::span<const double> v,
                                         std::span<const double> budget) {
  if (v.size() != budget.size()) {
    throw std::invalid_argument("cap_valuation: size mismatch");
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cap_valuation(v[i], budget[i]);
  return out;
}

struct NormalizationViolation {
  double valuation = 0;
  double payment = 0;
  std::string property;  // which of the four normalization rules failed
};

struct NormalizationReport {
  bool pass = true;
  std::optional<NormalizationViolation> violation;
};

/// Checks the four normalized risk-aversion properties of the model family
/// {model rebound to v : v in v_grid} on the payment grid:
/// monotone non-increasing in p, u(v)=0, u(0)=v, and u >= v-p inside [0, v]
/// with u <= v-p outside.
inline NormalizationReport check_normalization(const UtilityModel& prototype,
                                               std::span<const double> v_grid,
                                               std::span<const double> p_grid,
                                               double tol = 1e-12) {
  if (v_grid.empty() || p_grid.empty()) {
    throw std::invalid_argument("check_normalization: empty grid");
  }
  NormalizationReport report;
  auto fail = [&](double v, double p, const char* what) {
    report.pass = false;
    report.violation = NormalizationViolation{v, p, what};
  };
  for (double v : v_grid) {
    const UtilityModel model = prototype.with_valuation(v);
    const double uv = v;  // allocated value equals the valuation here
    double prev_p = -kInf, prev_u = kInf;
    auto at = [&](double p) { return eval_utility(model, uv, p).value(); };
    const double u0 = at(0.0);
    if (std::abs(u0 - v) > tol * std::max(1.0, std::abs(v))) {
      fail(v, 0.0, "u(x,0) = v(x)");
      return report;
    }
    const double uatv = at(v);
    if (std::abs(uatv) > tol * std::max(1.0, std::abs(v))) {
      fail(v, v, "u(x,v) = 0");
      return report;
    }
    for (double p : p_grid) {
      if (p < 0) continue;
      const double u = at(p);
      if (prev_p <= p && u > prev_u + tol) {
        fail(v, p, "monotone in p");
        return report;
      }
      const double quasi = v - p;
      if (p <= v && u < quasi - tol) {
        fail(v, p, "u >= v-p on [0, v]");
        return report;
      }
      if (p > v && u > quasi + tol) {
        fail(v, p, "u <= v-p beyond v");
        return report;
      }
      prev_p = p;
      prev_u = u;
    }
  }
  return report;
}

/// Finite lottery over quasilinear-utility outcomes.
struct Lottery {
  std::vector<std::pair<double, double>> outcomes;  // (probability, value)

  void validate() const {
    double total = 0;
    for (const auto& [p, _] : outcomes) {
      if (p < 0) throw std::invalid_argument("Lottery: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("Lottery: probabilities must sum to 1");
    }
  }

  double mean() const {
    const auto sorted = canonical();
    double m = 0;
    for (const auto& [p, x] : sorted) m += p * x;
    return m;
  }

  double variance() const {
    const auto sorted = canonical();
    double m = 0, m2 = 0;
    for (const auto& [p, x] : sorted) {
      m += p * x;
      m2 += p * x * x;
    }
    double var = m2 - m * m;
    if (var < 0) {
      if (var < -1e-12) throw std::logic_error("Lottery: variance < -1e-12");
      var = 0;
    }
    return var;
  }

  /// Outcomes in a canonical (value, probability) order, so moments are
  /// bitwise independent of how the lottery was assembled. Player-permuted
  /// evaluations of symmetric games then agree exactly.
  std::vector<std::pair<double, double>> canonical() const {
    auto sorted = outcomes;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second < b.second
                                            : a.first < b.first;
              });
    return sorted;
  }
};

/// E[l] - gamma * sqrt(Var[l]); the variance-aversion objective.
inline double variance_adjusted(const Lottery& lottery, double gamma) {
  if (gamma < 0 || gamma > 1) throw std::invalid_argument("gamma must be in [0,1]");
  lottery.validate();
  return lottery.mean() - gamma * std::sqrt(lottery.variance());
}

}  // namespace poalab
