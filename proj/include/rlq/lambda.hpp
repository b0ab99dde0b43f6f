#pragma once

/// Step Λ functions and exact evaluation of the four Λ-quantiles
///   q_Λ^-(f)  = inf{x: f(x) >= Λ(x)}     q_Λ^+(f)  = inf{x: f(x) > Λ(x)}
///   q~_Λ^-(f) = sup{x: f(x) <  Λ(x)}     q~_Λ^+(f) = sup{x: f(x) <= Λ(x)}
/// with inf∅ = +inf and sup∅ = -inf, for any increasing f: R -> [0,1],
/// plus the min/max representation formulas valid for decreasing Λ.

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "rlq/curve.hpp"
#include "rlq/numeric.hpp"

namespace rlq {

enum class QuantileKind { QMinus, QPlus, QTildeMinus, QTildePlus };

inline const char* to_string(QuantileKind k) {
  switch (k) {
    case QuantileKind::QMinus: return "qminus";
    case QuantileKind::QPlus: return "qplus";
    case QuantileKind::QTildeMinus: return "qtildeminus";
    case QuantileKind::QTildePlus: return "qtildeplus";
  }
  return "?";
}

enum class LambdaDirection { Increasing, Decreasing, Constant, NonMonotone };

/// Piecewise-constant Λ: level λ_k applies on [b_k, b_{k+1}) with b_0 = -inf
/// and b_{K+1} = +inf. A constant Λ (K = 0) reduces every Λ-quantile to the
/// plain quantile and counts as decreasing wherever monotonicity is required.
class StepLambda {
 public:
  StepLambda(std::vector<double> breakpoints, std::vector<double> levels)
      : breaks_(std::move(breakpoints)), levels_(std::move(levels)) {
    require(levels_.size() == breaks_.size() + 1,
            "step lambda: need one more level than breakpoints");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      require(breaks_[i - 1] < breaks_[i], "step lambda: breakpoints must increase");
    for (double l : levels_)
      require(l >= 0.0 && l <= 1.0, "step lambda: levels must lie in [0,1]");
  }

  static StepLambda constant(double level) { return StepLambda({}, {level}); }
  /// Two-level Λ_{(α,β;z)} = α on (-inf, z), β on [z, +inf).
  static StepLambda two_level(double alpha, double beta, double z) {
    return StepLambda({z}, {alpha, beta});
  }

  std::size_t pieces() const { return levels_.size(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& levels() const { return levels_; }

  double operator()(double x) const {
    auto j = std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin();
    return levels_[static_cast<std::size_t>(j)];
  }

  double inf_level() const { return *std::min_element(levels_.begin(), levels_.end()); }
  double sup_level() const { return *std::max_element(levels_.begin(), levels_.end()); }

  LambdaDirection direction() const {
    bool up = true, down = true;
    for (std::size_t i = 1; i < levels_.size(); ++i) {
      if (levels_[i] < levels_[i - 1]) up = false;
      if (levels_[i] > levels_[i - 1]) down = false;
    }
    if (up && down) return LambdaDirection::Constant;
    if (up) return LambdaDirection::Increasing;
    if (down) return LambdaDirection::Decreasing;
    return LambdaDirection::NonMonotone;
  }

  bool decreasing_or_constant() const {
    auto d = direction();
    return d == LambdaDirection::Decreasing || d == LambdaDirection::Constant;
  }

  /// Λ^c(x) = Λ(x + c): breakpoints move by -c.
  StepLambda shift(double c) const {
    std::vector<double> bs = breaks_;
    for (auto& b : bs) b -= c;
    return StepLambda(std::move(bs), levels_);
  }

  std::string to_spec() const {
    std::ostringstream os;
    os << "step:" << levels_[0];
    for (std::size_t i = 0; i < breaks_.size(); ++i)
      os << "," << breaks_[i] << "," << levels_[i + 1];
    return os.str();
  }

 private:
  std::vector<double> breaks_;  // b_1 < ... < b_K
  std::vector<double> levels_;  // λ_0, ..., λ_K
};

/// Parse "step:λ0[,b1,λ1[,b2,λ2...]]", e.g. "step:0.8,2,0.95".
inline StepLambda parse_lambda(const std::string& spec) {
  require(spec.rfind("step:", 0) == 0, "lambda spec must start with 'step:'");
  std::vector<double> nums;
  std::istringstream is(spec.substr(5));
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      require(used == tok.size(), "lambda spec: bad number '" + tok + "'");
      nums.push_back(v);
    } catch (const std::invalid_argument&) {
      throw invalid_input("lambda spec: bad number '" + tok + "'");
    } catch (const std::out_of_range&) {
      throw invalid_input("lambda spec: number out of range '" + tok + "'");
    }
  }
  require(!nums.empty() && nums.size() % 2 == 1,
          "lambda spec: expected λ0[,b1,λ1,...] with an odd number of entries");
  std::vector<double> breaks, levels;
  levels.push_back(nums[0]);
  for (std::size_t i = 1; i < nums.size(); i += 2) {
    breaks.push_back(nums[i]);
    levels.push_back(nums[i + 1]);
  }
  return StepLambda(std::move(breaks), std::move(levels));
}

/// Exact Λ-quantile of a monotone curve by per-interval scan. Within each
/// Λ-interval the target set {f >= λ_k} (etc.) is an up-set whose boundary is
/// a generalized inverse, so candidates are explicit; interval endpoints are
/// resolved by evaluating f there ([b_k, b_{k+1}) closed on the left).
inline double lambda_quantile(const MonotoneCurve& f, const StepLambda& lam,
                              QuantileKind kind) {
  const auto& bs = lam.breakpoints();
  const auto& lv = lam.levels();
  const std::size_t K = bs.size();
  auto lower_bk = [&](std::size_t k) { return k == 0 ? -kInf : bs[k - 1]; };
  auto upper_bk = [&](std::size_t k) { return k == K ? kInf : bs[k]; };

  switch (kind) {
    case QuantileKind::QMinus:
    case QuantileKind::QPlus: {
      Side side = kind == QuantileKind::QMinus ? Side::Left : Side::Right;
      for (std::size_t k = 0; k <= K; ++k) {
        double a = f.inverse(lv[k], side);
        double c = std::max(lower_bk(k), a);
        if (c < upper_bk(k)) return c;
      }
      return kInf;
    }
    case QuantileKind::QTildeMinus:
    case QuantileKind::QTildePlus: {
      Side side = kind == QuantileKind::QTildeMinus ? Side::Left : Side::Right;
      for (std::size_t kk = K + 1; kk-- > 0;) {
        double bk = lower_bk(kk);
        double a = f.inverse(lv[kk], side);
        bool accept = a > bk;
        if (!accept && a == bk && std::isfinite(bk)) {
          // the single point x = b_k belongs to the sub-level set?
          double fx = f.eval(bk);
          accept = kind == QuantileKind::QTildeMinus ? fx < lv[kk] : fx <= lv[kk];
        }
        if (accept) return std::min(upper_bk(kk), a);
      }
      return -kInf;
    }
  }
  return kNaN;
}

/// Representation formula for decreasing (or constant) Λ:
///   q_Λ^∓(F) = inf_x { q^∓_{Λ(x)}(F) ∨ x } = sup_x { q^∓_{Λ(x)}(F) ∧ x }.
/// Λ is interval-wise constant, so the infimum reduces to
/// min_k max(Q_k, b_k) with Q_k the plain λ_k-quantile. Must agree with
/// lambda_quantile on the same inputs; rejects non-decreasing Λ.
inline double representation_value(const MonotoneCurve& F, const StepLambda& lam,
                                   QuantileKind kind) {
  require(kind == QuantileKind::QMinus || kind == QuantileKind::QPlus,
          "representation_value: defined for the inf-form quantiles only");
  require(lam.decreasing_or_constant(),
          "representation_value: requires a decreasing (or constant) lambda");
  Side side = kind == QuantileKind::QMinus ? Side::Left : Side::Right;
  const auto& bs = lam.breakpoints();
  const auto& lv = lam.levels();
  double best = kInf;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    double q = F.inverse(lv[k], side);
    double lo = k == 0 ? -kInf : bs[k - 1];
    best = std::min(best, std::max(q, lo));
  }
  return best;
}

}  // namespace rlq
