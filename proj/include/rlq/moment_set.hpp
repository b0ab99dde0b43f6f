#pragma once

/// Extremal envelopes for the moment uncertainty set M_p(m, v): all
/// distributions with mean m and p-th absolute central moment at most v^p
/// (p > 1). The worst/best quantile level curves are
///   l(α) = m + v α D(α)^{-1},   u(α) = m - v (1-α) D(α)^{-1},
///   D(α) = (α^p (1-α) + (1-α)^p α)^{1/p},
/// and the envelopes are their right-continuous inverses; for p = 2 the
/// inverses have algebraic closed forms.

#include <cmath>

#include "rlq/curve.hpp"
#include "rlq/numeric.hpp"

namespace rlq {

class MomentSet {
 public:
  MomentSet(double p, double m, double v) : p_(p), m_(m), v_(v) {
    require(p > 1.0, "moment set: requires p > 1");
    require(v > 0.0, "moment set: requires v > 0");
  }

  double p() const { return p_; }
  double mean() const { return m_; }
  double bound() const { return v_; }

  /// Worst-case (sup) or best-case (inf) α-quantile over the set.
  double level_curve(double alpha, CurveSide side) const {
    require(alpha > 0.0 && alpha < 1.0, "level_curve: level outside (0,1)");
    double d = std::pow(std::pow(alpha, p_) * (1.0 - alpha) +
                            std::pow(1.0 - alpha, p_) * alpha,
                        1.0 / p_);
    return side == CurveSide::Worst ? m_ + v_ * alpha / d
                                    : m_ - v_ * (1.0 - alpha) / d;
  }

  /// Pointwise infimum (lower) or supremum (upper) of all member cdfs.
  /// Both are continuous; the lower envelope vanishes below m and the upper
  /// reaches 1 at m.
  MonotoneCurve envelope(EnvelopeSide side) const {
    double p = p_, m = m_, v = v_;
    if (side == EnvelopeSide::Lower) {
      auto level = [*this](double a) { return level_curve(a, CurveSide::Worst); };
      if (p == 2.0) {
        auto closed = [m, v](double x) {
          if (x <= m) return 0.0;
          double d = x - m;
          return d * d / (v * v + d * d);
        };
        return MonotoneCurve::inverse_of_increasing(level, m, kInf, closed);
      }
      return MonotoneCurve::inverse_of_increasing(level, m, kInf);
    }
    auto level = [*this](double a) { return level_curve(a, CurveSide::Best); };
    if (p == 2.0) {
      auto closed = [m, v](double x) {
        if (x >= m) return 1.0;
        double d = m - x;
        return v * v / (v * v + d * d);
      };
      return MonotoneCurve::inverse_of_increasing(level, -kInf, m, closed);
    }
    return MonotoneCurve::inverse_of_increasing(level, -kInf, m);
  }

 private:
  double p_, m_, v_;
};

}  // namespace rlq
