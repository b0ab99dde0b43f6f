#pragma once

/// Extremal envelopes for the p-Wasserstein ball of radius eps around a
/// baseline G. The worst-case α-quantile l(α) is the root of
///   ∫_α^1 (l - q_t)_+^p dt = eps^p,
/// the best-case u(α) the root of ∫_0^α (q_t - u)_+^p dt = eps^p, where q_t
/// is the left quantile of G. The t-integrals are evaluated in the x-domain
/// (Fubini): for p = 1 they reduce to survival-function integrals with closed
/// forms per family; discrete baselines use exact atom-cell sums; remaining
/// cases use adaptive quadrature of p (l-x)^{p-1} (G(x) - α) type integrands.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rlq/curve.hpp"
#include "rlq/distribution.hpp"
#include "rlq/numeric.hpp"
#include "rlq/numerics.hpp"

namespace rlq {

/// A perturbed quantile function attaining one envelope value, plus the level
/// it was built for. Transport cost to the baseline equals the ball radius.
struct WassersteinWitness {
  std::function<double(double)> quantile;  // t in (0,1)
  double alpha = 0.0;
  double value = 0.0;  // attained extremal quantile at alpha
};

class WassersteinBall {
 public:
  WassersteinBall(double p, Distribution base, double eps)
      : p_(p), base_(std::move(base)), eps_(eps) {
    require(p >= 1.0, "wasserstein ball: requires p >= 1");
    require(eps > 0.0, "wasserstein ball: requires eps > 0");
    Family f = base_.family();
    if (f == Family::Pareto || f == Family::StudentT)
      require(base_.params()[0] > p, "wasserstein ball: baseline lacks p-th moment");
  }

  double p() const { return p_; }
  double radius() const { return eps_; }
  const Distribution& baseline() const { return base_; }

  /// ∫_α^1 (l - q_t)_+^p dt: transport budget consumed by lifting the upper
  /// tail (α, 1] of the baseline quantile function up to l.
  double tail_cost(double l, double alpha) const {
    double qa = base_.quantile(alpha, Side::Left);
    if (l <= qa) return 0.0;
    if (!base_.continuous()) return cell_cost(l, alpha, 1.0, /*lift=*/true);
    if (p_ == 1.0)
      return (1.0 - alpha) * (l - qa) - base_.survival_integral(qa, l);
    auto f = [&](double x) {
      double w = std::min(base_.cdf(x), 1.0) - alpha;
      return w > 0.0 ? p_ * std::pow(l - x, p_ - 1.0) * w : 0.0;
    };
    return adaptive_simpson(f, qa, l, 1e-11);
  }

  /// ∫_0^α (q_t - u)_+^p dt: budget consumed by pulling the lower tail (0, α]
  /// of the baseline quantile function down to u.
  double head_cost(double u, double alpha) const {
    double qa = base_.quantile(alpha, Side::Left);
    if (u >= qa) return 0.0;
    if (!base_.continuous()) return cell_cost(u, 0.0, alpha, /*lift=*/false);
    double lo = base_.support_lo();
    double total = 0.0;
    if (!is_neg_inf(lo) && u < lo) total = alpha * std::pow(lo - u, p_);
    double a = std::max(u, lo);
    if (a >= qa) return total;
    if (p_ == 1.0)
      return total + (alpha - 1.0) * (qa - a) + base_.survival_integral(a, qa);
    auto f = [&](double x) {
      double w = alpha - base_.cdf(x);
      return w > 0.0 ? p_ * std::pow(x - u, p_ - 1.0) * w : 0.0;
    };
    return total + adaptive_simpson(f, a, qa, 1e-11);
  }

  /// Worst-case (sup) or best-case (inf) α-quantile over the ball; strictly
  /// beyond the baseline quantile on the corresponding side.
  double level_curve(double alpha, CurveSide side) const {
    require(alpha > 0.0 && alpha < 1.0, "level_curve: level outside (0,1)");
    double qa = base_.quantile(alpha, Side::Left);
    double target = std::pow(eps_, p_);
    if (side == CurveSide::Worst) {
      double hi = qa + eps_ * std::pow(1.0 - alpha, -1.0 / p_) + 1.0;
      auto g = [&](double l) { return tail_cost(l, alpha) - target; };
      return bisect_expand(g, qa, hi, 1e-9, /*grow_lo=*/false, /*grow_hi=*/true);
    }
    double lo = qa - eps_ * std::pow(alpha, -1.0 / p_) - 1.0;
    auto g = [&](double u) { return target - head_cost(u, alpha); };
    return bisect_expand(g, lo, qa, 1e-9, /*grow_lo=*/true, /*grow_hi=*/false);
  }

  /// Pointwise infimum (lower) or supremum (upper) of member cdfs; both are
  /// continuous and strictly increasing between their endpoint limits. The
  /// finite endpoint solves the full-interval (level 0+ resp. 1-) equation.
  MonotoneCurve envelope(EnvelopeSide side) const {
    double target = std::pow(eps_, p_);
    double med = base_.quantile(0.5, Side::Left);
    if (side == EnvelopeSide::Lower) {
      auto level = [*this](double a) { return level_curve(a, CurveSide::Worst); };
      auto g = [&](double l) { return full_lift_cost(l) - target; };
      double lo = base_.quantile(1e-12, Side::Right) - 1.0;
      double l0 = bisect_expand(g, std::min(lo, med), med + eps_ + 1.0, 1e-9, true, true);
      return MonotoneCurve::inverse_of_increasing(level, l0, kInf);
    }
    auto level = [*this](double a) { return level_curve(a, CurveSide::Best); };
    auto g = [&](double u) { return target - full_drop_cost(u); };
    double hi = base_.quantile(1.0 - 1e-12, Side::Left) + 1.0;
    double u1 = bisect_expand(g, med - eps_ - 1.0, std::max(hi, med), 1e-9, true, true);
    return MonotoneCurve::inverse_of_increasing(level, -kInf, u1);
  }

  /// Feasible member attaining level_curve(alpha, side): worst side lifts
  /// t ∈ (α,1] up to l(α); best side pulls t ∈ (0,α] down to u(α).
  WassersteinWitness witness(double alpha, CurveSide side) const {
    double v = level_curve(alpha, side);
    Distribution g = base_;
    WassersteinWitness w;
    w.alpha = alpha;
    w.value = v;
    if (side == CurveSide::Worst) {
      w.quantile = [g, alpha, v](double t) {
        double q = g.quantile(t, Side::Left);
        return t > alpha ? std::max(q, v) : q;
      };
    } else {
      w.quantile = [g, alpha, v](double t) {
        double q = g.quantile(t, Side::Left);
        return t <= alpha ? std::min(q, v) : q;
      };
    }
    return w;
  }

 private:
  /// Exact ∫ over (t0, t1] of (v - q_t)_+^p (lift) or (q_t - v)_+^p (drop)
  /// for discrete baselines: q_t is constant on each atom's cdf cell.
  double cell_cost(double v, double t0, double t1, bool lift) const {
    std::vector<double> atoms = base_.family() == Family::PointMass
                                    ? std::vector<double>{base_.params()[0]}
                                    : base_.samples();
    double n = static_cast<double>(atoms.size());
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      double c0 = static_cast<double>(i) / n, c1 = static_cast<double>(i + 1) / n;
      double len = std::min(c1, t1) - std::max(c0, t0);
      if (len <= 0.0) continue;
      double gap = lift ? v - atoms[i] : atoms[i] - v;
      if (gap > 0.0) total += std::pow(gap, p_) * len;
    }
    return total;
  }

  /// ∫_0^1 (l - q_t)_+^p dt. Unbounded-below baselines are truncated at the
  /// 1e-12 quantile; the neglected sliver is far below root tolerance.
  double full_lift_cost(double l) const {
    if (!base_.continuous()) return cell_cost(l, 0.0, 1.0, true);
    double lo = base_.support_lo();
    double a = is_neg_inf(lo) ? base_.quantile(1e-12, Side::Right) - 1.0 : lo;
    a = std::min(a, l);
    if (p_ == 1.0) return (l - a) - base_.survival_integral(a, l);
    auto f = [&](double x) { return p_ * std::pow(l - x, p_ - 1.0) * base_.cdf(x); };
    return adaptive_simpson(f, a, l, 1e-11);
  }

  /// ∫_0^1 (q_t - u)_+^p dt, finite whenever the baseline has a p-th moment.
  double full_drop_cost(double u) const {
    if (!base_.continuous()) return cell_cost(u, 0.0, 1.0, false);
    double hi = base_.support_hi();
    if (p_ == 1.0) return base_.survival_integral(u, kInf);
    double b = is_pos_inf(hi) ? base_.quantile(1.0 - 1e-12, Side::Left) + 1.0 : hi;
    if (u >= b) return 0.0;
    auto f = [&](double x) {
      return p_ * std::pow(x - u, p_ - 1.0) * (1.0 - base_.cdf(x));
    };
    return adaptive_simpson(f, u, b, 1e-11);
  }

  double p_;
  Distribution base_;
  double eps_;
};

}  // namespace rlq
