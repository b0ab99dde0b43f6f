#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rlq/distribution.hpp"
#include "rlq/numeric.hpp"
#include "rlq/wasserstein_ball.hpp"

using Catch::Approx;
using namespace rlq;

namespace {

/// Transport cost of a witness against its baseline, integrated in the
/// t-domain by midpoint rule — independent of the x-domain quadrature used
/// by the production cost functions.
double witness_cost(const WassersteinWitness& w, const Distribution& base,
                    double p, int n = 50000) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = (i + 0.5) / n;
    double gap = std::abs(w.quantile(t) - base.quantile(t, Side::Left));
    total += std::pow(gap, p) / n;
  }
  return total;
}

}  // namespace

TEST_CASE("ball construction validates order, radius and tails", "[wasserstein]") {
  CHECK_NOTHROW(WassersteinBall(1.0, Distribution::normal(0.0, 1.0), 0.1));
  CHECK_THROWS_AS(WassersteinBall(0.9, Distribution::normal(0.0, 1.0), 0.1),
                  invalid_input);
  CHECK_THROWS_AS(WassersteinBall(1.0, Distribution::normal(0.0, 1.0), 0.0),
                  invalid_input);
  // Baselines without a p-th moment cannot carry a p-cost ball.
  CHECK_THROWS_AS(WassersteinBall(2.0, Distribution::pareto(1.5, 1.0), 0.1),
                  invalid_input);
  CHECK_THROWS_AS(WassersteinBall(2.0, Distribution::student_t(2.0, 0.0, 1.0), 0.1),
                  invalid_input);
  CHECK_NOTHROW(WassersteinBall(2.0, Distribution::student_t(3.0, 0.0, 1.0), 0.1));
}

TEST_CASE("uniform baseline admits closed-form level curves", "[wasserstein]") {
  double s = std::sqrt(3.0);
  double a = 1.0 - s, width = 2.0 * s, eps = 0.1;
  WassersteinBall ball(1.0, Distribution::uniform(a, 1.0 + s), eps);

  // Lifting the whole tail above the support end: l = a + w(1+alpha)/2 + eps/(1-alpha).
  auto worst = [&](double alpha) {
    return a + width * (1.0 + alpha) / 2.0 + eps / (1.0 - alpha);
  };
  CHECK(ball.level_curve(0.95, CurveSide::Worst) ==
        Approx(worst(0.95)).margin(1e-8));
  CHECK(ball.level_curve(0.8, CurveSide::Worst) ==
        Approx(worst(0.8)).margin(1e-8));
  CHECK(worst(0.95) == Approx(4.64544826719).margin(1e-10));
  CHECK(worst(0.8) == Approx(2.885640646055).margin(1e-10));

  // Interior pull-down: the (alpha - g)^2 w / 2 budget identity gives
  // u = a + w alpha - sqrt(2 eps w).
  auto best = [&](double alpha) {
    return a + width * alpha - std::sqrt(2.0 * eps * width);
  };
  CHECK(ball.level_curve(0.8, CurveSide::Best) ==
        Approx(best(0.8)).margin(1e-8));
  CHECK(ball.level_curve(0.95, CurveSide::Best) ==
        Approx(best(0.95)).margin(1e-8));
  CHECK(best(0.8) == Approx(1.206872194484).margin(1e-10));
  CHECK(best(0.95) == Approx(1.726487436754).margin(1e-10));
}

TEST_CASE("normal and exponential level curves satisfy their root equations",
          "[wasserstein]") {
  const double eps = 0.1;
  WassersteinBall norm(1.0, Distribution::normal(1.0, 1.0), eps);
  WassersteinBall expo(1.0, Distribution::exponential(1.0), eps);

  struct Row {
    const WassersteinBall* ball;
    double alpha, worst, best;
  };
  const Row rows[] = {
      {&norm, 0.8, 2.83437948503, 1.066178843103},
      {&norm, 0.95, 5.062604725671, 1.580385739554},
      {&expo, 0.8, 2.80772834975, 0.7517612384882},
      {&expo, 0.95, 5.943263176096, 1.490490777761},
  };
  for (const auto& r : rows) {
    CHECK(r.ball->level_curve(r.alpha, CurveSide::Worst) ==
          Approx(r.worst).margin(1e-7));
    CHECK(r.ball->level_curve(r.alpha, CurveSide::Best) ==
          Approx(r.best).margin(1e-7));
    // The reference values solve the budget equations exactly.
    CHECK(r.ball->tail_cost(r.worst, r.alpha) == Approx(eps).margin(1e-8));
    CHECK(r.ball->head_cost(r.best, r.alpha) == Approx(eps).margin(1e-8));
  }
}

TEST_CASE("discrete baselines use exact atom-cell budgets", "[wasserstein]") {
  WassersteinBall point(1.0, Distribution::point_mass(0.0), 0.1);
  CHECK(point.level_curve(0.8, CurveSide::Worst) == Approx(0.5).margin(1e-8));
  CHECK(point.level_curve(0.8, CurveSide::Best) == Approx(-0.125).margin(1e-8));

  WassersteinBall two(1.0, Distribution::empirical({0.0, 2.0}), 0.1);
  // Above the upper atom's cell the entire budget lifts mass 1 - alpha.
  CHECK(two.level_curve(0.8, CurveSide::Worst) == Approx(2.5).margin(1e-8));
  // At alpha = 0.48 the lift spans both cells: l (1 - alpha) - 1 = eps.
  CHECK(two.level_curve(0.48, CurveSide::Worst) ==
        Approx(1.1 / 0.52).margin(1e-8));
  CHECK(two.level_curve(0.5, CurveSide::Best) == Approx(-0.2).margin(1e-8));
}

TEST_CASE("envelopes invert the level curves on every baseline", "[wasserstein]") {
  std::vector<WassersteinBall> balls;
  balls.emplace_back(1.0, Distribution::normal(1.0, 1.0), 0.1);
  balls.emplace_back(2.0, Distribution::normal(1.0, 1.0), 0.3);
  balls.emplace_back(1.0, Distribution::exponential(1.0), 0.1);
  balls.emplace_back(2.0, Distribution::uniform(0.0, 1.0), 0.05);
  balls.emplace_back(1.0, Distribution::empirical({0.0, 2.0}), 0.1);

  for (const auto& ball : balls) {
    auto lower = ball.envelope(EnvelopeSide::Lower);
    auto upper = ball.envelope(EnvelopeSide::Upper);
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9, 0.97}) {
      double l = ball.level_curve(alpha, CurveSide::Worst);
      double u = ball.level_curve(alpha, CurveSide::Best);
      REQUIRE(lower.eval(l) == Approx(alpha).margin(2e-7));
      REQUIRE(upper.eval(u) == Approx(alpha).margin(2e-7));
      REQUIRE(lower.inverse(alpha, Side::Left) == Approx(l).margin(2e-7));
      REQUIRE(upper.inverse(alpha, Side::Left) == Approx(u).margin(2e-7));
    }
    // Endpoint limits: the lower envelope starts at the full-budget lift
    // point, the upper one saturates at the full-budget drop point.
    auto hint = lower.domain_hint();
    REQUIRE(hint.first <= hint.second);
  }
}

TEST_CASE("level curves are monotone in level and radius", "[wasserstein]") {
  Distribution base = Distribution::exponential(1.0);
  for (double p : {1.0, 2.0}) {
    WassersteinBall small(p, base, 0.05), big(p, base, 0.2);
    double prev_l = -kInf, prev_u = -kInf;
    for (double alpha = 0.05; alpha < 0.99; alpha += 0.05) {
      double l = small.level_curve(alpha, CurveSide::Worst);
      double u = small.level_curve(alpha, CurveSide::Best);
      REQUIRE(l > prev_l);
      REQUIRE(u > prev_u);
      prev_l = l;
      prev_u = u;

      double q = base.quantile(alpha, Side::Left);
      REQUIRE(l > q);  // strictly beyond the baseline quantile
      REQUIRE(u < q);

      // A larger budget moves both extremes strictly outward.
      REQUIRE(big.level_curve(alpha, CurveSide::Worst) > l);
      REQUIRE(big.level_curve(alpha, CurveSide::Best) < u);
    }
  }
}

TEST_CASE("shrinking the radius recovers the baseline quantile", "[wasserstein]") {
  // at order p = 1 the cheapest way to raise the alpha-quantile by delta
  // costs ~ f(q) * delta^2 / 2, so the worst quantile approaches the baseline
  // like sqrt(2 eps / f(q)), not linearly in eps
  Distribution base = Distribution::normal(1.0, 1.0);
  for (double alpha : {0.2, 0.8}) {
    double q = base.quantile(alpha, Side::Left);
    double dens = rlq::norm_pdf(q - 1.0);
    double prev_gap = kInf;
    for (double eps : {1e-2, 1e-4, 1e-6}) {
      WassersteinBall ball(1.0, base, eps);
      double gap = ball.level_curve(alpha, CurveSide::Worst) - q;
      REQUIRE(gap > 0.0);
      // each 100x cut of the budget shrinks the gap by ~10x
      REQUIRE(gap < 0.2 * prev_gap);
      prev_gap = gap;
    }
    REQUIRE(prev_gap == Approx(std::sqrt(2e-6 / dens)).epsilon(0.1));
  }
}

TEST_CASE("witnesses are monotone, feasible and attaining", "[wasserstein]") {
  struct Case {
    double p;
    Distribution base;
  };
  const Case cases[] = {
      {1.0, Distribution::normal(1.0, 1.0)},
      {1.0, Distribution::exponential(1.0)},
      {2.0, Distribution::uniform(0.0, 1.0)},
  };
  const double eps = 0.1;
  for (const auto& c : cases) {
    WassersteinBall ball(c.p, c.base, eps);
    for (auto side : {CurveSide::Worst, CurveSide::Best}) {
      auto w = ball.witness(0.8, side);
      CHECK(w.alpha == 0.8);
      CHECK(w.value == Approx(ball.level_curve(0.8, side)).margin(1e-12));

      double prev = -kInf;
      for (int i = 1; i < 400; ++i) {
        double t = i / 400.0;
        double qt = w.quantile(t);
        REQUIRE(qt >= prev - 1e-12);
        prev = qt;
        // Perturbation acts on one side of alpha only.
        double base_q = c.base.quantile(t, Side::Left);
        if (side == CurveSide::Worst)
          REQUIRE(qt >= base_q - 1e-12);
        else
          REQUIRE(qt <= base_q + 1e-12);
      }
      // The transport budget is spent exactly.
      CHECK(witness_cost(w, c.base, c.p) ==
            Approx(std::pow(eps, c.p)).epsilon(2e-3));
    }
  }
}
