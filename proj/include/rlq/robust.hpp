#pragma once

/// Dispatch layer for robust Λ-quantiles: the sup (worst case) over an
/// uncertainty set is the Λ-quantile of the set's lower extremal curve, and
/// the inf (best case) that of the upper extremal curve. Each (kind,
/// direction) combination is tagged with whether the reduction is exact —
/// which depends on the Λ direction and on which envelope is attainable by a
/// member of the set — or only a one-sided bound. Finite sets are evaluated
/// by exact enumeration instead, which sidesteps the non-exact combinations
/// entirely; their min/max envelope is still exposed for cross-checks.

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rlq/aggregation_set.hpp"
#include "rlq/curve.hpp"
#include "rlq/lambda.hpp"
#include "rlq/moment_set.hpp"
#include "rlq/numeric.hpp"
#include "rlq/wasserstein_ball.hpp"

namespace rlq {

enum class OptDirection { Sup, Inf };
enum class Exactness { Exact, UpperBound, LowerBound };
enum class EnvelopeUsed { Lower, Upper, ClippedLower, ClippedUpper, Enumeration };

inline const char* to_string(OptDirection d) {
  return d == OptDirection::Sup ? "sup" : "inf";
}
inline const char* to_string(Exactness e) {
  switch (e) {
    case Exactness::Exact: return "exact";
    case Exactness::UpperBound: return "upper_bound";
    case Exactness::LowerBound: return "lower_bound";
  }
  return "?";
}
inline const char* to_string(EnvelopeUsed e) {
  switch (e) {
    case EnvelopeUsed::Lower: return "lower";
    case EnvelopeUsed::Upper: return "upper";
    case EnvelopeUsed::ClippedLower: return "clipped-lower";
    case EnvelopeUsed::ClippedUpper: return "clipped-upper";
    case EnvelopeUsed::Enumeration: return "enumeration";
  }
  return "?";
}

struct RobustResult {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  EnvelopeUsed envelope_used = EnvelopeUsed::Lower;
  QuantileKind kind = QuantileKind::QMinus;
  OptDirection direction = OptDirection::Sup;
  std::optional<double> clip_level;  // aggregation only
};

class UncertaintySet {
 public:
  using FiniteMembers = std::vector<MonotoneCurve>;

  static UncertaintySet finite(FiniteMembers members) {
    require(!members.empty(), "uncertainty set: needs at least one member");
    return UncertaintySet(std::move(members));
  }
  static UncertaintySet moment(MomentSet set) { return UncertaintySet(std::move(set)); }
  static UncertaintySet wasserstein(WassersteinBall ball) {
    return UncertaintySet(std::move(ball));
  }
  static UncertaintySet aggregation(AggregationSet set) {
    return UncertaintySet(std::move(set));
  }

  bool is_finite() const { return std::holds_alternative<FiniteMembers>(v_); }
  bool is_aggregation() const { return std::holds_alternative<AggregationSet>(v_); }
  const FiniteMembers& members() const { return std::get<FiniteMembers>(v_); }
  const MomentSet* as_moment() const { return std::get_if<MomentSet>(&v_); }
  const WassersteinBall* as_wasserstein() const {
    return std::get_if<WassersteinBall>(&v_);
  }
  const AggregationSet* as_aggregation() const {
    return std::get_if<AggregationSet>(&v_);
  }

  /// Attainability facts, fixed per tag. A finite set attains its pointwise
  /// min/max envelopes directly; the three parametric sets attain the lower
  /// envelope only through its left-limit variant (which coincides with it
  /// because their envelopes are continuous) and attain the upper envelope.
  bool lower_attainable_plain() const { return is_finite(); }
  bool lower_attainable_left_limit() const { return true; }
  bool upper_attainable() const { return true; }
  bool envelopes_continuous() const { return !is_finite(); }

 private:
  template <typename T>
  explicit UncertaintySet(T&& t) : v_(std::forward<T>(t)) {}
  std::variant<FiniteMembers, MomentSet, WassersteinBall, AggregationSet> v_;
};

/// Pointwise-extremal curve of the set: the lower curve is the infimum of
/// member cdfs (worst case for sup-direction queries), the upper curve their
/// supremum. For the aggregation set both are clipped at the certificate
/// level and exact only beyond it.
inline MonotoneCurve extremal_curve(const UncertaintySet& set, EnvelopeSide side) {
  if (set.is_finite()) {
    return side == EnvelopeSide::Lower ? MonotoneCurve::pointwise_min(set.members())
                                       : MonotoneCurve::pointwise_max(set.members());
  }
  if (const auto* m = set.as_moment()) return m->envelope(side);
  if (const auto* w = set.as_wasserstein()) return w->envelope(side);
  return set.as_aggregation()->envelope(side);
}

namespace detail {

inline void check_aggregation_hypotheses(const StepLambda& lam, OptDirection dir,
                                         double t) {
  if (dir == OptDirection::Sup) {
    if (t < lam.inf_level()) return;
    std::ostringstream os;
    os << "aggregation: clip level t = " << t << " is not below the smallest"
       << " value " << lam.inf_level() << " of the level function; the clipped"
       << " lower envelope supports sup-direction queries only for t < min level";
    throw invalid_input(os.str());
  }
  if (t > lam.sup_level()) return;
  std::ostringstream os;
  os << "aggregation: clip level t = " << t << " is not above the largest"
     << " value " << lam.sup_level() << " of the level function; the clipped"
     << " upper envelope supports inf-direction queries only for t > max level";
  throw invalid_input(os.str());
}

inline Exactness classify(const UncertaintySet& set, const StepLambda& lam,
                          QuantileKind kind, OptDirection dir) {
  bool dec = lam.decreasing_or_constant();
  bool lower_ok = set.lower_attainable_plain() ||
                  (dec && set.lower_attainable_left_limit() &&
                   set.envelopes_continuous());
  if (dir == OptDirection::Sup) {
    switch (kind) {
      case QuantileKind::QTildeMinus: return Exactness::Exact;
      case QuantileKind::QMinus:
        return dec ? Exactness::Exact : Exactness::UpperBound;
      case QuantileKind::QTildePlus:
        return lower_ok ? Exactness::Exact : Exactness::UpperBound;
      case QuantileKind::QPlus:
        return dec && lower_ok ? Exactness::Exact : Exactness::UpperBound;
    }
    return Exactness::UpperBound;
  }
  switch (kind) {
    case QuantileKind::QPlus: return Exactness::Exact;
    case QuantileKind::QTildePlus:
      return dec ? Exactness::Exact : Exactness::LowerBound;
    case QuantileKind::QMinus:
      return set.upper_attainable() ? Exactness::Exact : Exactness::LowerBound;
    case QuantileKind::QTildeMinus:
      return dec && set.upper_attainable() ? Exactness::Exact
                                           : Exactness::LowerBound;
  }
  return Exactness::LowerBound;
}

}  // namespace detail

inline RobustResult robust_lambda_quantile(const UncertaintySet& set,
                                           const StepLambda& lam, QuantileKind kind,
                                           OptDirection dir) {
  RobustResult res;
  res.kind = kind;
  res.direction = dir;

  if (set.is_finite()) {
    // exact per-member optimization; no attainability caveats apply
    bool first = true;
    double best = 0.0;
    for (const auto& f : set.members()) {
      double v = lambda_quantile(f, lam, kind);
      if (first || (dir == OptDirection::Sup ? v > best : v < best)) best = v;
      first = false;
    }
    res.value = best;
    res.exactness = Exactness::Exact;
    res.envelope_used = EnvelopeUsed::Enumeration;
    return res;
  }

  EnvelopeSide env_side =
      dir == OptDirection::Sup ? EnvelopeSide::Lower : EnvelopeSide::Upper;
  if (set.is_aggregation()) {
    double t = set.as_aggregation()->clip(env_side);
    detail::check_aggregation_hypotheses(lam, dir, t);
    res.clip_level = t;
    res.envelope_used = dir == OptDirection::Sup ? EnvelopeUsed::ClippedLower
                                                 : EnvelopeUsed::ClippedUpper;
  } else {
    res.envelope_used =
        dir == OptDirection::Sup ? EnvelopeUsed::Lower : EnvelopeUsed::Upper;
  }
  res.value = lambda_quantile(extremal_curve(set, env_side), lam, kind);
  res.exactness = detail::classify(set, lam, kind, dir);
  return res;
}

/// Constant-level specialization. The side names pair the optimization
/// direction with the plain quantile kind: sup_left = worst-case left
/// quantile, inf_right = best-case right quantile, and so on.
enum class QuantileSide { SupLeft, InfRight, SupRight, InfLeft };

inline RobustResult robust_quantile(const UncertaintySet& set, double alpha,
                                    QuantileSide side) {
  require(alpha > 0.0 && alpha < 1.0, "robust_quantile: level outside (0,1)");
  StepLambda lam = StepLambda::constant(alpha);
  switch (side) {
    case QuantileSide::SupLeft:
      return robust_lambda_quantile(set, lam, QuantileKind::QMinus, OptDirection::Sup);
    case QuantileSide::InfRight:
      return robust_lambda_quantile(set, lam, QuantileKind::QPlus, OptDirection::Inf);
    case QuantileSide::SupRight:
      return robust_lambda_quantile(set, lam, QuantileKind::QPlus, OptDirection::Sup);
    case QuantileSide::InfLeft:
      return robust_lambda_quantile(set, lam, QuantileKind::QMinus, OptDirection::Inf);
  }
  throw invalid_input("robust_quantile: unknown side");
}

}  // namespace rlq
