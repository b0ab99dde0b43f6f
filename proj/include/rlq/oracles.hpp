#pragma once

/// Independent brute-force verifiers: a definitional dense-grid Λ-quantile
/// scan, Monte-Carlo samplers of feasible set members, and a rearrangement
/// oracle for the worst aggregate quantile. These cross-check the closed-form
/// reductions in tests and back the `verify` command.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "rlq/curve.hpp"
#include "rlq/distribution.hpp"
#include "rlq/lambda.hpp"
#include "rlq/moment_set.hpp"
#include "rlq/numeric.hpp"
#include "rlq/numerics.hpp"
#include "rlq/robust.hpp"
#include "rlq/wasserstein_ball.hpp"

namespace rlq {

struct OracleConfig {
  std::uint64_t seed = 0;
  int grid = 2000;     ///< cells used by discretizing oracles
  int samples = 1000;  ///< Monte-Carlo member count
  double tol = 1e-6;
};

/// Scan window for the definitional grid evaluator.
struct ScanGrid {
  double lo = -10.0;
  double hi = 10.0;
  int points = 200001;
};

/// Window covering the curve's transition region and every level breakpoint.
inline ScanGrid default_window(const MonotoneCurve& f, const StepLambda& lam,
                               int points = 200001) {
  double lo = f.inverse(1e-9, Side::Right);
  double hi = f.inverse(1.0 - 1e-9, Side::Left);
  if (!std::isfinite(lo)) lo = -1e6;
  if (!std::isfinite(hi)) hi = 1e6;
  for (double b : lam.breakpoints()) {
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  return {lo - 1.0, hi + 1.0, points};
}

/// Definitional Λ-quantile: scan the window left to right and apply the
/// inf/sup definition verbatim. Differs from the analytic evaluator by at
/// most one grid step. `edge_warning` is set when the answer sits on the
/// window boundary, i.e. the window was too small to certify it.
inline double grid_lambda_quantile(const MonotoneCurve& f, const StepLambda& lam,
                                   QuantileKind kind, const ScanGrid& g,
                                   bool* edge_warning = nullptr) {
  require(g.points >= 2 && g.hi > g.lo, "grid scan: bad window");
  if (edge_warning) *edge_warning = false;
  const bool inf_type =
      kind == QuantileKind::QMinus || kind == QuantileKind::QPlus;
  double answer = inf_type ? kInf : -kInf;
  for (int j = 0; j < g.points; ++j) {
    double x = g.lo + (g.hi - g.lo) * j / (g.points - 1);
    double fx = f.eval(x);
    double lx = lam(x);
    bool hit = false;
    switch (kind) {
      case QuantileKind::QMinus: hit = fx >= lx; break;
      case QuantileKind::QPlus: hit = fx > lx; break;
      case QuantileKind::QTildeMinus: hit = fx < lx; break;
      case QuantileKind::QTildePlus: hit = fx <= lx; break;
    }
    if (inf_type) {
      if (hit) {
        answer = x;
        break;
      }
    } else if (hit) {
      answer = x;
    }
  }
  if (edge_warning && answer == (inf_type ? g.lo : g.hi)) *edge_warning = true;
  return answer;
}

/// N random finite discrete members of the moment set: exact mean by affine
/// recentering, p-th central moment pushed inside the budget by rescaling.
inline std::vector<Distribution> mc_feasible_moment(const MomentSet& set,
                                                    int n_samples,
                                                    std::uint64_t seed) {
  std::vector<Distribution> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  const double p = set.p(), m = set.mean(), v = set.bound();
  for (int i = 0; i < n_samples; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> size_d(2, 12);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> fill(0.3, 0.999);
    const int k = size_d(rng);
    std::vector<double> xs(static_cast<std::size_t>(k));
    for (auto& x : xs) x = m + v * noise(rng);
    auto recenter = [&] {
      double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
      for (auto& x : xs) x += m - mean;
    };
    recenter();
    recenter();  // second pass absorbs the rounding of the first
    double cm = 0.0;
    for (double x : xs) cm += std::pow(std::abs(x - m), p);
    cm /= k;
    const double budget = fill(rng) * std::pow(v, p);
    if (cm > budget) {
      const double c = std::pow(budget / cm, 1.0 / p);
      for (auto& x : xs) x = m + c * (x - m);
      recenter();
      recenter();
    }
    out.push_back(Distribution::empirical(std::move(xs)));
  }
  return out;
}

namespace detail {

/// ∫_{ua}^{ub} q(u) du for a distribution's left quantile, via survival
/// integrals (no quadrature). Handles unbounded tails by reflection.
inline double quantile_block(const Distribution& d, double ua, double ub) {
  if (ub <= ua) return 0.0;
  if (ua == 0.0 && ub == 1.0)
    return quantile_block(d, 0.0, 0.5) + quantile_block(d, 0.5, 1.0);
  double a = d.quantile(ua, Side::Left);
  if (!std::isfinite(a))  // unbounded below: mirror into the upper tail
    return -quantile_block(d.reflect(), 1.0 - ub, 1.0 - ua);
  double b = d.quantile(ub, Side::Left);
  if (!std::isfinite(b))
    return a * (ub - ua) + d.survival_integral(a, kInf);
  return a * (ub - ua) + (ub - 1.0) * (b - a) + d.survival_integral(a, b);
}

/// ∫_{u0}^{u1} |c − q(u)|^p du. Exact for p = 1; clipped per-cell adaptive
/// quadrature otherwise.
inline double cell_deviation(const Distribution& d, double c, double u0,
                             double u1, double p) {
  if (u1 <= u0) return 0.0;
  if (p == 1.0) {
    double us = std::clamp(d.cdf(c), u0, u1);
    double below = c * (us - u0) - quantile_block(d, u0, us);
    double above = quantile_block(d, us, u1) - c * (u1 - us);
    return std::max(below, 0.0) + std::max(above, 0.0);
  }
  double a = std::max(u0, 1e-9), b = std::min(u1, 1.0 - 1e-9);
  if (b <= a) return 0.0;
  return adaptive_simpson(
      [&](double u) { return std::pow(std::abs(c - d.quantile(u, Side::Left)), p); },
      a, b, 1e-11);
}

}  // namespace detail

/// p-th power of the transport distance between the baseline and the
/// equal-weight discrete member with atoms `qs` (one per uniform cell).
inline double transport_cost_pow(const Distribution& base,
                                 const std::vector<double>& qs, double p) {
  const auto cells = qs.size();
  double total = 0.0;
  for (std::size_t j = 0; j < cells; ++j)
    total += detail::cell_deviation(base, qs[j], static_cast<double>(j) / cells,
                                    static_cast<double>(j + 1) / cells, p);
  return total;
}

/// N random members of the ball: smooth monotone perturbations of the
/// baseline quantile function, shrunk toward the baseline until the measured
/// transport cost fits inside the budget.
inline std::vector<Distribution> mc_feasible_wasserstein(const WassersteinBall& ball,
                                                         int n_samples,
                                                         std::uint64_t seed,
                                                         int cells = 256) {
  const Distribution& g = ball.baseline();
  const double p = ball.p(), eps = ball.radius();
  const double pi = 3.14159265358979323846;

  std::vector<double> qmid(static_cast<std::size_t>(cells));
  for (int j = 0; j < cells; ++j)
    qmid[static_cast<std::size_t>(j)] =
        g.quantile(std::clamp((j + 0.5) / cells, 1e-9, 1.0 - 1e-9), Side::Left);
  const double floor_cost = transport_cost_pow(g, qmid, p);
  require(2.0 * floor_cost <= std::pow(0.995 * eps, p),
          "feasible sampler: discretization floor exceeds the radius budget; "
          "increase the cell count");

  std::vector<Distribution> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(i));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double amp = eps * (0.3 + 2.7 * unif(rng));
    const double a1 = noise(rng), a2 = noise(rng), a3 = noise(rng);
    const double drift = noise(rng);
    std::vector<double> qh(static_cast<std::size_t>(cells));
    for (int j = 0; j < cells; ++j) {
      double u = (j + 0.5) / cells;
      double d = a1 * std::sin(pi * u) + a2 * std::sin(2 * pi * u) +
                 a3 * std::sin(3 * pi * u) + drift * (u - 0.5);
      qh[static_cast<std::size_t>(j)] = qmid[static_cast<std::size_t>(j)] + amp * d;
    }
    std::sort(qh.begin(), qh.end());
    const double target = std::min(
        std::max(std::pow(eps * (0.3 + 0.69 * unif(rng)), p), 2.0 * floor_cost),
        std::pow(0.995 * eps, p));
    std::vector<double> qs(qh);
    double s = 1.0;
    for (int tries = 0; tries < 200; ++tries) {
      for (int j = 0; j < cells; ++j)
        qs[static_cast<std::size_t>(j)] =
            (1.0 - s) * qmid[static_cast<std::size_t>(j)] +
            s * qh[static_cast<std::size_t>(j)];
      if (transport_cost_pow(g, qs, p) <= target) break;
      s *= 0.75;
    }
    out.push_back(Distribution::empirical(std::move(qs)));
  }
  return out;
}

/// Rearrangement oracle result; `plateaued` reports termination by a
/// non-improvement plateau (as opposed to the iteration cap).
struct RaReport {
  double value = 0.0;
  int iterations = 0;
  bool plateaued = false;
};

/// Approximate sup of VaR_α(X₁+…+Xₙ) over all dependence structures:
/// discretize each marginal's tail beyond α into m cells (left endpoints, so
/// the value is a lower bound converging as m grows), then iteratively make
/// each column antitone to the sum of the others until the minimal row sum
/// stops improving.
inline RaReport ra_bruteforce(const std::vector<Distribution>& marginals,
                              double alpha, int m, int max_iters,
                              std::uint64_t seed) {
  require(!marginals.empty(), "rearrangement oracle: no marginals");
  require(alpha > 0.0 && alpha < 1.0, "rearrangement oracle: level outside (0,1)");
  require(m >= 100, "rearrangement oracle: needs at least 100 cells");
  const std::size_t n = marginals.size();
  if (n == 1)
    return {marginals[0].quantile(alpha, Side::Left), 0, true};

  const auto cells = static_cast<std::size_t>(m);
  std::vector<std::vector<double>> cols(n, std::vector<double>(cells));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cells; ++k)
      cols[i][k] =
          marginals[i].quantile(alpha + (1.0 - alpha) * k / m, Side::Left);
    std::mt19937_64 rng(seed + i);
    std::shuffle(cols[i].begin(), cols[i].end(), rng);
  }

  std::vector<double> rowsum(cells, 0.0), rest(cells);
  std::vector<std::size_t> order(cells);
  for (const auto& col : cols)
    for (std::size_t k = 0; k < cells; ++k) rowsum[k] += col[k];
  auto min_row = [&] { return *std::min_element(rowsum.begin(), rowsum.end()); };

  double best = min_row();
  int it = 0;
  bool improved = true;
  while (improved && it < max_iters) {
    improved = false;
    ++it;
    for (std::size_t i = 0; i < n; ++i) {
      auto& col = cols[i];
      for (std::size_t k = 0; k < cells; ++k) rest[k] = rowsum[k] - col[k];
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return rest[a] < rest[b]; });
      std::sort(col.begin(), col.end(), std::greater<>());
      std::vector<double> placed(cells);
      for (std::size_t k = 0; k < cells; ++k) placed[order[k]] = col[k];
      col = std::move(placed);
      for (std::size_t k = 0; k < cells; ++k) rowsum[k] = rest[k] + col[k];
    }
    double now = min_row();
    if (now > best + 1e-12) {
      best = now;
      improved = true;
    }
  }
  return {best, it, !improved};
}

/// Envelope-vs-member audit used by `verify`: sample feasible members (or
/// rearrangement values for aggregation sets) and count violations of the
/// sup/inf bounds, reporting the worst gap.
struct VerifyReport {
  int samples = 0;
  int violations = 0;
  double max_gap = 0.0;
};

inline VerifyReport verify_set(const UncertaintySet& set, const StepLambda& lam,
                               int n_samples, std::uint64_t seed) {
  VerifyReport rep;
  auto exceed = [](double v, double bound) {
    return v > bound ? v - bound : 0.0;
  };

  if (set.is_aggregation()) {
    const AggregationSet& agg = *set.as_aggregation();
    double t = agg.clip(EnvelopeSide::Lower);
    int levels = std::min(std::max(n_samples, 1), 8);
    for (int j = 0; j < levels; ++j) {
      double alpha = t + (1.0 - t) * (j + 0.5) / levels;
      alpha = std::min(alpha, 0.999);
      double env = robust_quantile(set, alpha, QuantileSide::SupLeft).value;
      RaReport ra =
          ra_bruteforce(agg.marginals(), alpha, 2000, 50, seed + static_cast<std::uint64_t>(j));
      double gap = exceed(ra.value, env);
      ++rep.samples;
      if (gap > 0.02) ++rep.violations;
      rep.max_gap = std::max(rep.max_gap, gap);
    }
    return rep;
  }

  std::vector<MonotoneCurve> members;
  if (set.is_finite()) {
    members = set.members();
  } else if (const auto* ms = set.as_moment()) {
    for (auto& d : mc_feasible_moment(*ms, n_samples, seed))
      members.push_back(MonotoneCurve::from_distribution(std::move(d)));
  } else {
    for (auto& d : mc_feasible_wasserstein(*set.as_wasserstein(), n_samples, seed))
      members.push_back(MonotoneCurve::from_distribution(std::move(d)));
  }

  static constexpr QuantileKind kKinds[] = {
      QuantileKind::QMinus, QuantileKind::QPlus, QuantileKind::QTildeMinus,
      QuantileKind::QTildePlus};
  for (QuantileKind kind : kKinds) {
    double hi = robust_lambda_quantile(set, lam, kind, OptDirection::Sup).value;
    double lo = robust_lambda_quantile(set, lam, kind, OptDirection::Inf).value;
    for (const auto& member : members) {
      double v = lambda_quantile(member, lam, kind);
      double gap = std::max(exceed(v, hi), exceed(lo, v));
      ++rep.samples;
      if (gap > 1e-6) ++rep.violations;
      rep.max_gap = std::max(rep.max_gap, gap);
    }
  }
  return rep;
}

}  // namespace rlq
