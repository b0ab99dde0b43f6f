#pragma once

/// Numerical workhorses shared by the envelope modules and the portfolio
/// optimizer: bracketed bisection, golden-section line search, adaptive
/// Simpson quadrature, and a box-constrained Nelder-Mead simplex.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rlq/numeric.hpp"

namespace rlq {

/// Root of a monotone function on [lo, hi] by bisection; assumes
/// f(lo) and f(hi) bracket zero (sign change, either orientation).
/// Returns the midpoint once the bracket is narrower than xtol.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw numerical_error("bisect: endpoints do not bracket a root");
  for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Expands [lo, hi] geometrically until f changes sign, then bisects.
/// `grow_hi` / `grow_lo` select which side may move.
inline double bisect_expand(const std::function<double(double)>& f, double lo,
                            double hi, double xtol, bool grow_lo, bool grow_hi,
                            int max_expand = 80) {
  double flo = f(lo), fhi = f(hi);
  double width = std::max(hi - lo, 1.0);
  int n = 0;
  while ((flo > 0) == (fhi > 0)) {
    if (++n > max_expand)
      throw numerical_error("bisect_expand: no sign change after bracket growth");
    width *= 2;
    if (grow_hi) {
      hi += width;
      fhi = f(hi);
    }
    if ((flo > 0) != (fhi > 0)) break;
    if (grow_lo) {
      lo -= width;
      flo = f(lo);
    }
    if (!grow_lo && !grow_hi)
      throw numerical_error("bisect_expand: fixed bracket without sign change");
  }
  return bisect(f, lo, hi, xtol);
}

/// Golden-section minimization of a unimodal function on [a, b].
inline double golden_section(const std::function<double(double)>& f, double a,
                             double b, double xtol) {
  static const double invphi = 0.6180339887498948482;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

namespace detail {

inline double simpson_rule(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson_rule(fa, flm, fm, m - a);
  double right = simpson_rule(fm, frm, fb, b - m);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over the finite interval [a, b] with
/// absolute tolerance `tol`.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-10, int max_depth = 48) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = detail::simpson_rule(fa, fm, fb, b - a);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Downhill-simplex (Nelder-Mead) minimizer with an optional feasibility
/// projection applied to every trial point. Stops when the objective spread
/// over the simplex falls below `ftol` or `max_iter` is reached.
/// Returns the best point; `best_f` receives its objective value.
inline std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, double step, double ftol, int max_iter,
    double* best_f = nullptr,
    const std::function<void(std::vector<double>&)>& project = nullptr) {
  const std::size_t n = start.size();
  auto eval = [&](std::vector<double> p) {
    if (project) project(p);
    return std::make_pair(f(p), std::move(p));
  };

  std::vector<std::pair<double, std::vector<double>>> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(eval(start));
  for (std::size_t i = 0; i < n; ++i) {
    auto p = start;
    p[i] += step;
    simplex.push_back(eval(std::move(p)));
  }
  auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };

  for (int it = 0; it < max_iter; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (simplex.back().first - simplex.front().first < ftol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {         // centroid of all but worst
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].second[j];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);
    const auto& worst = simplex.back();

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + coef * (worst.second[j] - centroid[j]);
      return eval(std::move(p));
    };

    auto reflected = blend(-1.0);
    if (reflected.first < simplex.front().first) {
      auto expanded = blend(-2.0);
      simplex.back() = expanded.first < reflected.first ? expanded : reflected;
      continue;
    }
    if (reflected.first < simplex[n - 1].first) {
      simplex.back() = reflected;
      continue;
    }
    auto contracted = blend(0.5);
    if (contracted.first < worst.first) {
      simplex.back() = contracted;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {  // shrink toward the best vertex
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = 0.5 * (simplex[0].second[j] + simplex[i].second[j]);
      simplex[i] = eval(std::move(p));
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  if (best_f) *best_f = simplex.front().first;
  return simplex.front().second;
}

}  // namespace rlq
