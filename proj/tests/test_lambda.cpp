#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rlq/curve.hpp"
#include "rlq/distribution.hpp"
#include "rlq/lambda.hpp"
#include "rlq/numeric.hpp"

using Catch::Approx;
using namespace rlq;

namespace {

constexpr QuantileKind kAllKinds[] = {QuantileKind::QMinus, QuantileKind::QPlus,
                                      QuantileKind::QTildeMinus,
                                      QuantileKind::QTildePlus};

/// Exact reference evaluator for step curve vs step level function. Both
/// inputs are constant on right-open intervals between their pooled knots,
/// so each comparison set is a finite union of right-open intervals and the
/// inf/sup can be read off the event grid directly.
double scan_quantile(const MonotoneCurve& f, const StepLambda& lam,
                     QuantileKind kind, const std::vector<double>& f_knots) {
  std::vector<double> ev = f_knots;
  ev.insert(ev.end(), lam.breakpoints().begin(), lam.breakpoints().end());
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
  if (ev.empty()) ev.push_back(0.0);

  auto holds = [&](double x) {
    double fx = f.eval(x), lx = lam(x);
    switch (kind) {
      case QuantileKind::QMinus: return fx >= lx;
      case QuantileKind::QPlus: return fx > lx;
      case QuantileKind::QTildeMinus: return fx < lx;
      case QuantileKind::QTildePlus: return fx <= lx;
    }
    return false;
  };

  bool inf_form =
      kind == QuantileKind::QMinus || kind == QuantileKind::QPlus;
  if (inf_form) {
    if (holds(ev.front() - 1.0)) return -kInf;
    for (double e : ev)
      if (holds(e)) return e;
    return kInf;
  }
  if (holds(ev.back())) return kInf;  // holds on the last unbounded interval
  for (std::size_t i = ev.size(); i-- > 0;) {
    double probe = i == 0 ? ev.front() - 1.0 : ev[i - 1];
    if (holds(probe)) return ev[i];  // right-open interval ending at ev[i]
  }
  return -kInf;
}

MonotoneCurve shift_step_curve(const std::vector<double>& xs,
                               const std::vector<double>& vs, double c) {
  std::vector<double> moved = xs;
  for (double& x : moved) x += c;
  return MonotoneCurve::step(moved, vs);
}

}  // namespace

TEST_CASE("step lambda evaluation, direction tags and levels", "[lambda]") {
  auto up = StepLambda::two_level(0.8, 0.95, 2.0);
  CHECK(up(1.999) == 0.8);
  CHECK(up(2.0) == 0.95);  // closed on the left at the breakpoint
  CHECK(up(5.0) == 0.95);
  CHECK(up.direction() == LambdaDirection::Increasing);
  CHECK_FALSE(up.decreasing_or_constant());
  CHECK(up.inf_level() == 0.8);
  CHECK(up.sup_level() == 0.95);

  auto down = StepLambda::two_level(0.95, 0.8, 2.0);
  CHECK(down.direction() == LambdaDirection::Decreasing);
  CHECK(down.decreasing_or_constant());

  auto flat = StepLambda::constant(0.5);
  CHECK(flat.direction() == LambdaDirection::Constant);
  CHECK(flat.decreasing_or_constant());
  CHECK(flat(-100.0) == 0.5);
  CHECK(flat(100.0) == 0.5);

  auto wiggle = StepLambda({0.0, 1.0}, {0.3, 0.7, 0.5});
  CHECK(wiggle.direction() == LambdaDirection::NonMonotone);

  CHECK_THROWS_AS(StepLambda({1.0, 0.0}, {0.1, 0.2, 0.3}), invalid_input);
  CHECK_THROWS_AS(StepLambda({0.0}, {0.1}), invalid_input);
  CHECK_THROWS_AS(StepLambda({}, {1.5}), invalid_input);
}

TEST_CASE("lambda spec strings parse and round-trip", "[lambda]") {
  auto lam = parse_lambda("step:0.8,2,0.95");
  CHECK(lam.pieces() == 2);
  CHECK(lam(0.0) == 0.8);
  CHECK(lam(2.0) == 0.95);

  auto back = parse_lambda(lam.to_spec());
  CHECK(back.breakpoints() == lam.breakpoints());
  CHECK(back.levels() == lam.levels());

  CHECK(parse_lambda("step:0.5").pieces() == 1);
  CHECK_THROWS_AS(parse_lambda("0.8,2,0.95"), invalid_input);
  CHECK_THROWS_AS(parse_lambda("step:0.8,2"), invalid_input);
  CHECK_THROWS_AS(parse_lambda("step:0.8,two,0.95"), invalid_input);
  CHECK_THROWS_AS(parse_lambda("step:"), invalid_input);
}

TEST_CASE("two-level quantiles of unit-mean unit-variance families", "[lambda]") {
  auto up = StepLambda::two_level(0.8, 0.95, 2.0);
  auto norm = MonotoneCurve::from_distribution(Distribution::normal(1.0, 1.0));
  auto expo = MonotoneCurve::from_distribution(Distribution::exponential(1.0));
  double s = std::sqrt(3.0);
  auto unif =
      MonotoneCurve::from_distribution(Distribution::uniform(1.0 - s, 1.0 + s));

  // Crossing below the breakpoint: the 0.8-quantile decides the inf forms,
  // the 0.95-quantile the sup forms.
  CHECK(lambda_quantile(norm, up, QuantileKind::QMinus) ==
        Approx(1.841621233573).margin(1e-9));
  CHECK(lambda_quantile(norm, up, QuantileKind::QPlus) ==
        Approx(1.841621233573).margin(1e-9));
  CHECK(lambda_quantile(norm, up, QuantileKind::QTildeMinus) ==
        Approx(2.644853626951).margin(1e-9));
  CHECK(lambda_quantile(norm, up, QuantileKind::QTildePlus) ==
        Approx(2.644853626951).margin(1e-9));

  CHECK(lambda_quantile(expo, up, QuantileKind::QMinus) ==
        Approx(std::log(5.0)).margin(1e-10));
  CHECK(lambda_quantile(expo, up, QuantileKind::QTildeMinus) ==
        Approx(std::log(20.0)).margin(1e-10));

  // Uniform crosses only above the breakpoint, where the level is 0.95.
  double u95 = 1.0 + 0.9 * s;  // 2.55884572681199
  for (auto kind : kAllKinds)
    CHECK(lambda_quantile(unif, up, kind) == Approx(u95).margin(1e-12));

  // Decreasing direction: normal and exponential already clear 0.8 at the
  // breakpoint, so every kind sticks at x = 2; uniform needs 1 + 0.6*sqrt(3).
  auto down = StepLambda::two_level(0.95, 0.8, 2.0);
  for (auto kind : kAllKinds) {
    CHECK(lambda_quantile(norm, down, kind) == Approx(2.0).margin(1e-12));
    CHECK(lambda_quantile(expo, down, kind) == Approx(2.0).margin(1e-12));
    CHECK(lambda_quantile(unif, down, kind) ==
          Approx(2.03923048454133).margin(1e-11));
  }
}

TEST_CASE("constant lambda reduces to plain quantiles", "[lambda]") {
  auto flat = StepLambda::constant(0.5);
  auto f = MonotoneCurve::step({0.0, 2.0}, {0.0, 0.5, 1.0});
  CHECK(lambda_quantile(f, flat, QuantileKind::QMinus) == 0.0);
  CHECK(lambda_quantile(f, flat, QuantileKind::QPlus) == 2.0);
  CHECK(lambda_quantile(f, flat, QuantileKind::QTildeMinus) == 0.0);
  CHECK(lambda_quantile(f, flat, QuantileKind::QTildePlus) == 2.0);

  // Empty comparison sets resolve to the extended-real conventions.
  auto expo = MonotoneCurve::from_distribution(Distribution::exponential(1.0));
  CHECK(is_pos_inf(lambda_quantile(expo, StepLambda::constant(1.0),
                                   QuantileKind::QMinus)));
  CHECK(is_neg_inf(lambda_quantile(expo, StepLambda::constant(0.0),
                                   QuantileKind::QTildeMinus)));
}

TEST_CASE("breakpoint membership is resolved exactly", "[lambda]") {
  // Point mass at 1 against a level function that reaches 1 at the atom.
  auto atom = MonotoneCurve::step({1.0}, {0.0, 1.0});
  auto lam = StepLambda({1.0}, {0.5, 1.0});
  // {f < lambda} = (-inf, 1): the atom itself fails the strict comparison.
  CHECK(lambda_quantile(atom, lam, QuantileKind::QTildeMinus) == 1.0);
  // {f <= lambda} also holds at and beyond the atom, hence unbounded.
  CHECK(is_pos_inf(lambda_quantile(atom, lam, QuantileKind::QTildePlus)));
}

TEST_CASE("enumerated envelope can exceed every member", "[lambda]") {
  auto lam = StepLambda({0.0, 0.5, 1.0}, {0.25, 0.25, 0.375, 0.5});
  auto f1 = MonotoneCurve::step({0.0, 1.0}, {0.0, 1.0 / 3.0, 1.0});
  auto f2 = MonotoneCurve::step({0.5}, {0.0, 1.0});
  CHECK(lambda_quantile(f1, lam, QuantileKind::QMinus) == 0.0);
  CHECK(lambda_quantile(f2, lam, QuantileKind::QMinus) == 0.5);

  auto lower = MonotoneCurve::pointwise_min({f1, f2});
  // The pointwise-minimum curve dips below the level strip both members
  // clear, so its crossing happens strictly later than either member's.
  CHECK(lambda_quantile(lower, lam, QuantileKind::QMinus) == 1.0);
}

TEST_CASE("mixing toward a point can overshoot both anchors", "[lambda]") {
  auto lam = StepLambda({0.5, 1.5}, {0.3, 0.525, 0.75});
  auto x = MonotoneCurve::step({0.0, 2.0}, {0.0, 0.5, 1.0});
  CHECK(lambda_quantile(x, lam, QuantileKind::QMinus) == 0.0);

  const double t = 7.0 / 4.0;
  auto t_point = MonotoneCurve::step({t}, {0.0, 1.0});
  CHECK(lambda_quantile(t_point, lam, QuantileKind::QMinus) == t);

  // One-eighth of X blended toward t lands on {49/32, 57/32}.
  auto mix =
      MonotoneCurve::step({49.0 / 32.0, 57.0 / 32.0}, {0.0, 0.5, 1.0});
  double q_mix = lambda_quantile(mix, lam, QuantileKind::QMinus);
  CHECK(q_mix == 57.0 / 32.0);
  CHECK(q_mix > std::max(0.0, t));  // strictly above both anchor values
}

TEST_CASE("kind ordering holds on randomized step instances", "[lambda]") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  std::uniform_real_distribution<double> ul(0.0, 1.0);
  std::uniform_int_distribution<int> nknots(1, 4);
  std::uniform_int_distribution<int> nbreaks(0, 3);

  for (int trial = 0; trial < 2000; ++trial) {
    int m = nknots(rng);
    std::vector<double> xs(m), vs(m + 1);
    for (auto& v : xs) v = ux(rng);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    vs.resize(xs.size() + 1);
    for (auto& v : vs) v = ul(rng);
    std::sort(vs.begin(), vs.end());
    auto f = MonotoneCurve::step(xs, vs);

    int kb = nbreaks(rng);
    std::vector<double> bs(kb), lv(kb + 1);
    for (auto& b : bs) b = ux(rng);
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    lv.resize(bs.size() + 1);
    for (auto& l : lv) l = ul(rng);
    StepLambda lam(bs, lv);

    double qm = lambda_quantile(f, lam, QuantileKind::QMinus);
    double qp = lambda_quantile(f, lam, QuantileKind::QPlus);
    double tm = lambda_quantile(f, lam, QuantileKind::QTildeMinus);
    double tp = lambda_quantile(f, lam, QuantileKind::QTildePlus);
    REQUIRE(qm <= qp);
    REQUIRE(tm <= tp);
    REQUIRE(qm <= tm);
    REQUIRE(qp <= tp);

    // Exact agreement with the event-grid reference on all four kinds.
    REQUIRE(qm == scan_quantile(f, lam, QuantileKind::QMinus, xs));
    REQUIRE(qp == scan_quantile(f, lam, QuantileKind::QPlus, xs));
    REQUIRE(tm == scan_quantile(f, lam, QuantileKind::QTildeMinus, xs));
    REQUIRE(tp == scan_quantile(f, lam, QuantileKind::QTildePlus, xs));
  }
}

TEST_CASE("decreasing lambda collapses the kind pairs", "[lambda]") {
  std::mt19937_64 rng(92);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  std::uniform_real_distribution<double> ul(0.0, 1.0);
  for (int trial = 0; trial < 1500; ++trial) {
    std::vector<double> xs = {ux(rng), ux(rng), ux(rng)};
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> vs(xs.size() + 1);
    for (auto& v : vs) v = ul(rng);
    std::sort(vs.begin(), vs.end());
    auto f = MonotoneCurve::step(xs, vs);

    std::vector<double> bs = {ux(rng), ux(rng)};
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    std::vector<double> lv(bs.size() + 1);
    for (auto& l : lv) l = ul(rng);
    std::sort(lv.rbegin(), lv.rend());
    StepLambda lam(bs, lv);
    REQUIRE(lam.decreasing_or_constant());

    double qm = lambda_quantile(f, lam, QuantileKind::QMinus);
    double qp = lambda_quantile(f, lam, QuantileKind::QPlus);
    REQUIRE(qm == lambda_quantile(f, lam, QuantileKind::QTildeMinus));
    REQUIRE(qp == lambda_quantile(f, lam, QuantileKind::QTildePlus));

    // Min-over-pieces representation agrees with the direct evaluation.
    REQUIRE(representation_value(f, lam, QuantileKind::QMinus) == qm);
    REQUIRE(representation_value(f, lam, QuantileKind::QPlus) == qp);
  }

  auto up = StepLambda::two_level(0.8, 0.95, 2.0);
  auto f = MonotoneCurve::step({0.0}, {0.0, 1.0});
  CHECK_THROWS_AS(representation_value(f, up, QuantileKind::QMinus),
                  invalid_input);
  CHECK_THROWS_AS(representation_value(f, StepLambda::constant(0.5),
                                       QuantileKind::QTildeMinus),
                  invalid_input);
}

TEST_CASE("shifting argument and level function together is exact", "[lambda]") {
  std::mt19937_64 rng(93);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  std::uniform_real_distribution<double> ul(0.05, 0.95);
  for (int trial = 0; trial < 800; ++trial) {
    std::vector<double> xs = {ux(rng), ux(rng)};
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> vs(xs.size() + 1);
    for (auto& v : vs) v = ul(rng);
    std::sort(vs.begin(), vs.end());
    vs.front() = 0.0;
    vs.back() = 1.0;
    auto f = MonotoneCurve::step(xs, vs);

    StepLambda lam({ux(rng)}, {ul(rng), ul(rng)});
    double c = ux(rng);
    auto shifted = shift_step_curve(xs, vs, c);  // cdf of X + c
    for (auto kind : kAllKinds) {
      double lhs = lambda_quantile(shifted, lam, kind);
      double rhs = lambda_quantile(f, lam.shift(c), kind);
      if (std::isfinite(lhs) || std::isfinite(rhs))
        REQUIRE(lhs == Approx(rhs + c).margin(1e-12));
      else
        REQUIRE(lhs == rhs + c);  // matching infinities
    }
  }
}

TEST_CASE("cash additivity direction follows the level slope", "[lambda]") {
  std::mt19937_64 rng(94);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  std::uniform_real_distribution<double> ul(0.05, 0.95);
  std::uniform_real_distribution<double> uc(0.0, 1.5);
  int checked = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    std::vector<double> xs = {ux(rng), ux(rng)};
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> vs(xs.size() + 1);
    for (auto& v : vs) v = ul(rng);
    std::sort(vs.begin(), vs.end());
    vs.front() = 0.0;
    vs.back() = 1.0;
    auto f = MonotoneCurve::step(xs, vs);
    double c = uc(rng);
    auto up_shifted = shift_step_curve(xs, vs, c);

    double a = ul(rng), b = ul(rng);
    StepLambda down({ux(rng)}, {std::max(a, b), std::min(a, b)});
    StepLambda up({ux(rng)}, {std::min(a, b), std::max(a, b)});

    double base_down = lambda_quantile(f, down, QuantileKind::QMinus);
    double move_down = lambda_quantile(up_shifted, down, QuantileKind::QMinus);
    if (std::isfinite(base_down) && std::isfinite(move_down)) {
      REQUIRE(move_down <= base_down + c + 1e-12);  // cash subadditive
      ++checked;
    }
    double base_up = lambda_quantile(f, up, QuantileKind::QMinus);
    double move_up = lambda_quantile(up_shifted, up, QuantileKind::QMinus);
    if (std::isfinite(base_up) && std::isfinite(move_up))
      REQUIRE(move_up >= base_up + c - 1e-12);  // cash superadditive
  }
  REQUIRE(checked > 500);  // the sweep exercised real cases
}
