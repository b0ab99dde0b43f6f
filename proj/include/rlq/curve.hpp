#pragma once

/// MonotoneCurve: a type-erased increasing map R -> [0,1] with point
/// evaluation, left limits and generalized inverses. Unifies proper cdfs,
/// discrete step cdfs, tabulated curves, inverses of increasing level
/// functions (envelope curves), lazy callables, and pointwise min/max
/// combinations (finite-set envelopes). Instances are immutable and freely
/// shareable across threads.

#include <algorithm>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "rlq/distribution.hpp"
#include "rlq/numeric.hpp"
#include "rlq/numerics.hpp"

namespace rlq {

/// Which extremal envelope of an uncertainty set a curve represents: the
/// Lower envelope is the pointwise infimum of member cdfs, Upper the
/// pointwise supremum.
enum class EnvelopeSide { Lower, Upper };

/// Which branch of a level curve alpha -> x to evaluate: Worst follows the
/// lower envelope (largest crossing point), Best the upper envelope.
enum class CurveSide { Worst, Best };

namespace detail {

struct CurveImpl {
  virtual ~CurveImpl() = default;
  virtual double eval(double x) const = 0;
  virtual double left_limit(double x) const = 0;
  /// Side::Left -> inf{x: eval(x) >= lambda}; Side::Right -> inf{x: eval(x) > lambda}.
  virtual double inverse(double lambda, Side side) const = 0;
  /// Finite [lo, hi] outside which the curve is (essentially) constant.
  virtual std::pair<double, double> domain_hint() const = 0;
};

/// Monotone boolean bisection: smallest x in [lo, hi] with pred(x) true,
/// given pred(lo) = false, pred(hi) = true; 1e-12 absolute tolerance.
inline double monotone_boundary(const std::function<bool(double)>& pred, double lo,
                                double hi, double xtol = 1e-12) {
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

struct ParametricCurve final : CurveImpl {
  explicit ParametricCurve(Distribution d) : dist(std::move(d)) {}
  double eval(double x) const override { return dist.cdf(x); }
  double left_limit(double x) const override { return dist.cdf_left(x); }
  double inverse(double lambda, Side side) const override {
    return dist.quantile(lambda, side);
  }
  std::pair<double, double> domain_hint() const override {
    double lo = dist.quantile(1e-9, Side::Left);
    double hi = dist.quantile(1.0 - 1e-9, Side::Left);
    if (is_neg_inf(lo)) lo = dist.support_lo();
    if (is_pos_inf(hi)) hi = dist.support_hi();
    return {lo - 1.0, hi + 1.0};
  }
  Distribution dist;
};

struct StepCurve final : CurveImpl {
  StepCurve(std::vector<double> x, std::vector<double> v)
      : xs(std::move(x)), vs(std::move(v)) {
    require(vs.size() == xs.size() + 1, "step curve: need one more value than knots");
    require(std::is_sorted(xs.begin(), xs.end()), "step curve: knots must be sorted");
    require(std::is_sorted(vs.begin(), vs.end()), "step curve: values must increase");
    require(vs.front() >= 0.0 && vs.back() <= 1.0, "step curve: values outside [0,1]");
  }
  double eval(double x) const override {
    auto j = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    return vs[static_cast<std::size_t>(j)];
  }
  double left_limit(double x) const override {
    auto j = std::lower_bound(xs.begin(), xs.end(), x) - xs.begin();
    return vs[static_cast<std::size_t>(j)];
  }
  double inverse(double lambda, Side side) const override {
    // value vs[j] holds on [xs[j-1], xs[j]) (with xs[-1] = -inf, xs[K] = +inf)
    for (std::size_t j = 0; j < vs.size(); ++j) {
      bool hit = side == Side::Left ? vs[j] >= lambda : vs[j] > lambda;
      if (hit) return j == 0 ? -kInf : xs[j - 1];
    }
    return kInf;
  }
  std::pair<double, double> domain_hint() const override {
    if (xs.empty()) return {-1.0, 1.0};
    return {xs.front() - 1.0, xs.back() + 1.0};
  }
  std::vector<double> xs, vs;
};

struct GridCurve final : CurveImpl {
  GridCurve(std::vector<double> x, std::vector<double> v)
      : xs(std::move(x)), vs(std::move(v)) {
    require(xs.size() == vs.size() && xs.size() >= 2, "grid curve: size mismatch");
    require(std::is_sorted(xs.begin(), xs.end()), "grid curve: grid must be sorted");
    require(std::is_sorted(vs.begin(), vs.end()), "grid curve: values must increase");
    require(vs.front() >= 0.0 && vs.back() <= 1.0, "grid curve: values outside [0,1]");
  }
  double eval(double x) const override {
    if (x <= xs.front()) return vs.front();
    if (x >= xs.back()) return vs.back();
    auto i = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return vs[i - 1] + w * (vs[i] - vs[i - 1]);
  }
  double left_limit(double x) const override { return eval(x); }
  double inverse(double lambda, Side side) const override {
    bool first_hit = side == Side::Left ? vs.front() >= lambda : vs.front() > lambda;
    if (first_hit) return -kInf;
    for (std::size_t i = 1; i < vs.size(); ++i) {
      bool hit = side == Side::Left ? vs[i] >= lambda : vs[i] > lambda;
      if (hit) {
        double w = (lambda - vs[i - 1]) / (vs[i] - vs[i - 1]);
        return xs[i - 1] + w * (xs[i] - xs[i - 1]);
      }
    }
    return kInf;
  }
  std::pair<double, double> domain_hint() const override {
    return {xs.front(), xs.back()};
  }
  std::vector<double> xs, vs;
};

/// Curve defined as the right-continuous inverse of a strictly increasing,
/// continuous level function g: (0,1) -> R, i.e. eval(x) = inf{t: g(t) > x}.
/// `g_at_0` / `g_at_1` are the analytic endpoint limits (may be infinite);
/// `closed_eval`, when provided, replaces the numeric inversion.
struct InverseCurve final : CurveImpl {
  InverseCurve(std::function<double(double)> level, double g0, double g1,
               std::function<double(double)> closed = nullptr)
      : g(std::move(level)), g_at_0(g0), g_at_1(g1), closed_eval(std::move(closed)) {}
  double eval(double x) const override {
    if (closed_eval) return closed_eval(x);
    if (x < g_at_0) return 0.0;
    if (x >= g_at_1) return 1.0;
    // g continuous strictly increasing: boundary of {t: g(t) > x}.
    return monotone_boundary([&](double t) { return g(t) > x; }, 0.0, 1.0, 1e-13);
  }
  double left_limit(double x) const override { return eval(x); }  // continuous
  double inverse(double lambda, Side side) const override {
    if (lambda == 0.0) return side == Side::Left ? -kInf : g_at_0;
    if (lambda == 1.0) return side == Side::Left ? g_at_1 : kInf;
    return g(lambda);  // both generalized inverses coincide off {0,1}
  }
  std::pair<double, double> domain_hint() const override {
    double lo = is_neg_inf(g_at_0) ? g(1e-9) : g_at_0;
    double hi = is_pos_inf(g_at_1) ? g(1.0 - 1e-9) : g_at_1;
    return {lo - 1.0, hi + 1.0};
  }
  std::function<double(double)> g;
  double g_at_0, g_at_1;
  std::function<double(double)> closed_eval;
};

/// Arbitrary monotone callable with numeric inverses on a bracket that is
/// expanded geometrically when the target level lies outside.
struct CallableCurve final : CurveImpl {
  CallableCurve(std::function<double(double)> f, double lo, double hi,
                std::function<double(double)> left = nullptr)
      : fn(std::move(f)), lo_hint(lo), hi_hint(hi), left_fn(std::move(left)) {}
  double eval(double x) const override { return fn(x); }
  double left_limit(double x) const override { return left_fn ? left_fn(x) : fn(x); }
  double inverse(double lambda, Side side) const override {
    auto pred = [&](double x) {
      return side == Side::Left ? fn(x) >= lambda : fn(x) > lambda;
    };
    double lo = lo_hint, hi = hi_hint, width = std::max(hi - lo, 1.0);
    for (int n = 0; n < 80 && pred(lo); ++n) {
      width *= 2;
      lo -= width;
    }
    if (pred(lo)) return -kInf;
    width = std::max(hi - lo, 1.0);
    for (int n = 0; n < 80 && !pred(hi); ++n) {
      width *= 2;
      hi += width;
    }
    if (!pred(hi)) return kInf;
    return monotone_boundary(pred, lo, hi);
  }
  std::pair<double, double> domain_hint() const override { return {lo_hint, hi_hint}; }
  std::function<double(double)> fn;
  double lo_hint, hi_hint;
  std::function<double(double)> left_fn;
};

struct CombineCurve final : CurveImpl {
  CombineCurve(std::vector<std::shared_ptr<const CurveImpl>> cs, bool take_min)
      : children(std::move(cs)), is_min(take_min) {
    require(!children.empty(), "envelope: need at least one curve");
  }
  template <typename F>
  double fold(F&& f) const {
    double acc = f(*children.front());
    for (std::size_t i = 1; i < children.size(); ++i) {
      double v = f(*children[i]);
      acc = is_min ? std::min(acc, v) : std::max(acc, v);
    }
    return acc;
  }
  double eval(double x) const override {
    return fold([&](const CurveImpl& c) { return c.eval(x); });
  }
  double left_limit(double x) const override {
    return fold([&](const CurveImpl& c) { return c.left_limit(x); });
  }
  double inverse(double lambda, Side side) const override {
    // Superlevel sets intersect under min (union under max), so the inverse
    // of a pointwise min is the max of the members' inverses and vice versa.
    double acc = children.front()->inverse(lambda, side);
    for (std::size_t i = 1; i < children.size(); ++i) {
      double v = children[i]->inverse(lambda, side);
      acc = is_min ? std::max(acc, v) : std::min(acc, v);
    }
    return acc;
  }
  std::pair<double, double> domain_hint() const override {
    auto h = children.front()->domain_hint();
    for (std::size_t i = 1; i < children.size(); ++i) {
      auto hi = children[i]->domain_hint();
      h.first = std::min(h.first, hi.first);
      h.second = std::max(h.second, hi.second);
    }
    return h;
  }
  std::vector<std::shared_ptr<const CurveImpl>> children;
  bool is_min;
};

}  // namespace detail

class MonotoneCurve {
 public:
  MonotoneCurve() = default;

  static MonotoneCurve from_distribution(Distribution d) {
    return MonotoneCurve(std::make_shared<detail::ParametricCurve>(std::move(d)));
  }
  /// Right-continuous step curve: value vs[k] on [xs[k-1], xs[k]).
  static MonotoneCurve step(std::vector<double> xs, std::vector<double> vs) {
    return MonotoneCurve(
        std::make_shared<detail::StepCurve>(std::move(xs), std::move(vs)));
  }
  /// Piecewise-linear interpolation through (xs, vs), constant outside.
  static MonotoneCurve grid(std::vector<double> xs, std::vector<double> vs) {
    return MonotoneCurve(
        std::make_shared<detail::GridCurve>(std::move(xs), std::move(vs)));
  }
  static MonotoneCurve inverse_of_increasing(std::function<double(double)> level,
                                             double level_at_0, double level_at_1,
                                             std::function<double(double)> closed_eval = nullptr) {
    return MonotoneCurve(std::make_shared<detail::InverseCurve>(
        std::move(level), level_at_0, level_at_1, std::move(closed_eval)));
  }
  static MonotoneCurve callable(std::function<double(double)> f, double lo_hint,
                                double hi_hint,
                                std::function<double(double)> left_limit = nullptr) {
    return MonotoneCurve(std::make_shared<detail::CallableCurve>(
        std::move(f), lo_hint, hi_hint, std::move(left_limit)));
  }
  static MonotoneCurve pointwise_min(const std::vector<MonotoneCurve>& curves) {
    return combine(curves, true);
  }
  static MonotoneCurve pointwise_max(const std::vector<MonotoneCurve>& curves) {
    return combine(curves, false);
  }

  bool valid() const { return static_cast<bool>(impl_); }

  double eval(double x) const { return impl_->eval(x); }
  double left_limit(double x) const { return impl_->left_limit(x); }
  /// Side::Left: inf{x: eval(x) >= lambda} (so level 0 -> -inf);
  /// Side::Right: inf{x: eval(x) > lambda} (so level 1 -> +inf).
  double inverse(double lambda, Side side) const {
    require(lambda >= 0.0 && lambda <= 1.0, "inverse: level outside [0,1]");
    if (lambda == 0.0 && side == Side::Left) return -kInf;
    if (lambda == 1.0 && side == Side::Right) return kInf;
    return impl_->inverse(lambda, side);
  }
  std::pair<double, double> domain_hint() const { return impl_->domain_hint(); }

  /// The underlying distribution when this curve wraps one (else nullptr).
  const Distribution* distribution() const {
    auto p = std::dynamic_pointer_cast<const detail::ParametricCurve>(impl_);
    return p ? &p->dist : nullptr;
  }

 private:
  explicit MonotoneCurve(std::shared_ptr<const detail::CurveImpl> impl)
      : impl_(std::move(impl)) {}

  static MonotoneCurve combine(const std::vector<MonotoneCurve>& curves, bool is_min) {
    std::vector<std::shared_ptr<const detail::CurveImpl>> impls;
    impls.reserve(curves.size());
    for (const auto& c : curves) impls.push_back(c.impl_);
    return MonotoneCurve(std::make_shared<detail::CombineCurve>(std::move(impls), is_min));
  }

  std::shared_ptr<const detail::CurveImpl> impl_;
};

}  // namespace rlq
