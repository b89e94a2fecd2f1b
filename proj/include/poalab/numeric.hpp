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
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace poalab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow.
inline double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// log(1 - e^x) for x < 0.
inline double log1m_exp(double x) {
  assert(x <= 0.0);
  // split at -ln2 for accuracy (Maechler's rule)
  return x > -0.6931471805599453 ? std::log(-std::expm1(x))
                                 : std::log1p(-std::exp(x));
}

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a,
                           double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-8,
                               int max_depth = 48) {
  if (!(a <= b)) throw std::invalid_argument("adaptive_simpson: a > b");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Fixed-step composite Simpson on n subintervals (n rounded up to even).
/// Kept deliberately simple; used as an independent cross-check of the
/// adaptive rule.
inline double fixed_simpson(const std::function<double(double)>& f, double a,
                            double b, std::int64_t n) {
  if (n < 2) throw std::invalid_argument("fixed_simpson: n < 2");
  if (n % 2 != 0) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double odd = 0.0, even = 0.0;
  for (std::int64_t i = 1; i < n; i += 2) odd += f(a + h * static_cast<double>(i));
  for (std::int64_t i = 2; i < n; i += 2) even += f(a + h * static_cast<double>(i));
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

/// Monotone cubic Hermite table for a cumulative integral: values are
/// non-decreasing, slopes are the (non-negative) integrand at the nodes.
/// Fritsch-Carlson limiting keeps the interpolant monotone between nodes.
class CumulativeTable {
 public:
  CumulativeTable() = default;
  CumulativeTable(std::vector<double> nodes, std::vector<double> values,
                  std::vector<double> slopes)
      : x_(std::move(nodes)), y_(std::move(values)), d_(std::move(slopes)) {
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != d_.size()) {
      throw std::invalid_argument("CumulativeTable: bad sizes");
    }
    limit_slopes();
  }

  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }
  double back_y() const { return y_.back(); }

  double eval(double x) const {
    const auto [i, t, h] = locate(x);
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  }

  double eval_derivative(double x) const {
    const auto [i, t, h] = locate(x);
    const double g00 = 6 * t * (t - 1);
    const double g10 = (1 - t) * (1 - 3 * t);
    const double g01 = -g00;
    const double g11 = t * (3 * t - 2);
    return g00 * y_[i] / h + g10 * d_[i] + g01 * y_[i + 1] / h + g11 * d_[i + 1];
  }

 private:
  struct Loc {
    std::size_t i;
    double t;
    double h;
  };

  Loc locate(double x) const {
    if (x <= x_.front()) return {0, 0.0, x_[1] - x_[0]};
    if (x >= x_.back()) {
      const std::size_t i = x_.size() - 2;
      return {i, 1.0, x_[i + 1] - x_[i]};
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    return {i, (x - x_[i]) / h, h};
  }

  void limit_slopes() {
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double h = x_[i + 1] - x_[i];
      if (!(h > 0)) throw std::invalid_argument("CumulativeTable: nodes not increasing");
      const double secant = (y_[i + 1] - y_[i]) / h;
      if (secant <= 0) continue;  // flat piece: slopes stay as given (>= 0)
      const double cap = 3.0 * secant;
      d_[i] = std::clamp(d_[i], 0.0, cap);
      d_[i + 1] = std::clamp(d_[i + 1], 0.0, cap);
    }
  }

  std::vector<double> x_, y_, d_;
};

/// Builds a cumulative-integral table of `f` over the given nodes using
/// composite Simpson on each cell (with the cell midpoint), storing f itself
/// as the Hermite slope.
inline CumulativeTable cumulative_integral(const std::function<double(double)>& f,
                                           const std::vector<double>& nodes) {
  std::vector<double> y(nodes.size(), 0.0), d(nodes.size(), 0.0);
  d[0] = f(nodes[0]);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i], b = nodes[i + 1];
    const double fm = f(0.5 * (a + b));
    d[i + 1] = f(b);
    y[i + 1] = y[i] + (b - a) / 6.0 * (d[i] + 4.0 * fm + d[i + 1]);
  }
  return CumulativeTable(nodes, std::move(y), std::move(d));
}

/// Bisection for a monotone non-decreasing function; returns x with
/// fn(x) ~= target, refined to absolute tolerance on x.
inline double bisect_increasing(const std::function<double(double)>& fn,
                                double lo, double hi, double target,
                                double xtol = 1e-13, int max_iter = 200) {
  double flo = fn(lo);
  if (target <= flo) return lo;
  double fhi = fn(hi);
  if (target >= fhi) return hi;
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Deterministic 64-bit RNG (splitmix64 seeded xoshiro256**). Behaviour does
/// not depend on the standard library, so seeded runs are reproducible
/// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& si : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      si = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n).
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_double() * static_cast<double>(n)) % n;
  }

  /// Samples an index from unnormalised non-negative weights.
  std::size_t sample_weighted(const std::vector<double>& w, double total) {
    double u = next_double() * total;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      u -= w[i];
      if (u < 0) return i;
    }
    return w.size() - 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace poalab
