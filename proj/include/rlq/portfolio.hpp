#pragma once

/// Robust portfolio selection: project a multivariate ambiguity structure to
/// the univariate uncertainty set of the weighted loss wᵀX, evaluate the
/// worst-case Λ-quantile there, and minimize it over the long-only simplex.
/// Also provides the majorization (diversification) order on weight vectors.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "rlq/aggregation_set.hpp"
#include "rlq/distribution.hpp"
#include "rlq/lambda.hpp"
#include "rlq/moment_set.hpp"
#include "rlq/numeric.hpp"
#include "rlq/numerics.hpp"
#include "rlq/robust.hpp"
#include "rlq/wasserstein_ball.hpp"

namespace rlq {

using Matrix = std::vector<std::vector<double>>;

/// Long-only weights on the unit simplex (no short-selling).
class Weights {
 public:
  explicit Weights(std::vector<double> w) : w_(std::move(w)) {
    require(!w_.empty(), "weights: empty vector");
    double sum = 0.0;
    for (double& wi : w_) {
      require(wi > -1e-12, "weights: negative weight");
      if (wi < 0.0) wi = 0.0;
      sum += wi;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "weights: must sum to one");
  }
  const std::vector<double>& get() const { return w_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  std::vector<double> w_;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double quad_form(const Matrix& s, const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) total += w[i] * s[i][j] * w[j];
  return std::max(total, 0.0);
}

/// Symmetry + Cholesky-style positive-semidefiniteness check.
inline void check_psd(const Matrix& s) {
  const std::size_t n = s.size();
  require(n > 0, "covariance: empty matrix");
  double scale = 1e-12;
  for (const auto& row : s) {
    require(row.size() == n, "covariance: matrix is not square");
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      require(std::abs(s[i][j] - s[j][i]) <= 1e-10 * scale,
              "covariance: matrix is not symmetric");
  Matrix l(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double d = s[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    require(d > -1e-10 * scale, "covariance: matrix is not positive semidefinite");
    l[j][j] = std::sqrt(std::max(d, 0.0));
    for (std::size_t i = j + 1; i < n; ++i) {
      if (l[j][j] == 0.0) continue;
      double v = s[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = v / l[j][j];
    }
  }
}

/// Euclidean projection onto the unit simplex: shift by the largest theta
/// with positive support, clamp at zero.
inline void project_simplex(std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    css += u[k];
    double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  double sum = 0.0;
  for (auto& vi : v) {
    vi = std::max(vi - theta, 0.0);
    sum += vi;
  }
  for (auto& vi : v) vi /= sum;  // absorb rounding
}

}  // namespace detail

/// Worst-case objective: the Λ-quantile kind whose sup-reduction is exact on
/// every projected set — q̃_Λ^- for any Λ, or q̃_Λ^+ for decreasing Λ.
struct PortfolioObjective {
  StepLambda lambda;
  QuantileKind kind = QuantileKind::QTildeMinus;
};

struct MomentMarket {
  std::vector<double> mu;
  Matrix sigma;
};

struct WassersteinMarket {
  std::vector<double> mu;
  Matrix sigma;
  std::function<Distribution(double, double)> base;  // (location, scale) ↦ baseline
  double a = 2.0;   // weight-norm index; the radius scales by ‖w‖_{a/(a-1)}
  double p = 1.0;   // transport order
  double eps = 0.1;
};

struct AggregationMarket {
  Distribution marginal;
  std::size_t assets = 2;
  std::optional<double> clip;
};

class PortfolioProblem {
 public:
  static PortfolioProblem moment(std::vector<double> mu, Matrix sigma,
                                 PortfolioObjective obj) {
    detail::check_psd(sigma);
    require(mu.size() == sigma.size(), "portfolio: mean/covariance size mismatch");
    return PortfolioProblem(MomentMarket{std::move(mu), std::move(sigma)},
                            std::move(obj));
  }
  static PortfolioProblem wasserstein(std::vector<double> mu, Matrix sigma,
                                      std::function<Distribution(double, double)> base,
                                      double a, double p, double eps,
                                      PortfolioObjective obj) {
    detail::check_psd(sigma);
    require(mu.size() == sigma.size(), "portfolio: mean/covariance size mismatch");
    require(a >= 1.0, "portfolio: weight-norm index must be >= 1");
    require(p >= 1.0, "portfolio: transport order must be >= 1");
    require(eps > 0.0, "portfolio: radius must be positive");
    return PortfolioProblem(
        WassersteinMarket{std::move(mu), std::move(sigma), std::move(base), a, p, eps},
        std::move(obj));
  }
  static PortfolioProblem aggregation(Distribution marginal, std::size_t assets,
                                      PortfolioObjective obj,
                                      std::optional<double> clip = std::nullopt) {
    require(assets >= 1, "portfolio: needs at least one asset");
    return PortfolioProblem(AggregationMarket{std::move(marginal), assets, clip},
                            std::move(obj));
  }

  std::size_t assets() const {
    if (const auto* m = std::get_if<MomentMarket>(&market_)) return m->mu.size();
    if (const auto* w = std::get_if<WassersteinMarket>(&market_)) return w->mu.size();
    return std::get<AggregationMarket>(market_).assets;
  }
  const PortfolioObjective& objective() const { return objective_; }
  const MomentMarket* as_moment() const { return std::get_if<MomentMarket>(&market_); }
  const WassersteinMarket* as_wasserstein() const {
    return std::get_if<WassersteinMarket>(&market_);
  }
  const AggregationMarket* as_aggregation() const {
    return std::get_if<AggregationMarket>(&market_);
  }

 private:
  template <typename M>
  PortfolioProblem(M&& market, PortfolioObjective obj)
      : market_(std::forward<M>(market)), objective_(std::move(obj)) {
    bool admissible = objective_.kind == QuantileKind::QTildeMinus ||
                      (objective_.kind == QuantileKind::QTildePlus &&
                       objective_.lambda.decreasing_or_constant());
    require(admissible,
            "portfolio objective: kind must be qtildeminus, or qtildeplus with a "
            "decreasing level function");
  }

  std::variant<MomentMarket, WassersteinMarket, AggregationMarket> market_;
  PortfolioObjective objective_;
};

/// Univariate uncertainty set of the weighted loss wᵀX.
inline UncertaintySet project(const PortfolioProblem& prob, const Weights& w) {
  require(w.size() == prob.assets(), "portfolio: weight dimension mismatch");
  if (const auto* m = prob.as_moment()) {
    double loc = detail::dot(m->mu, w.get());
    double sc = std::sqrt(detail::quad_form(m->sigma, w.get()));
    return UncertaintySet::moment(MomentSet(2.0, loc, sc));
  }
  if (const auto* wm = prob.as_wasserstein()) {
    double loc = detail::dot(wm->mu, w.get());
    double sc = std::sqrt(detail::quad_form(wm->sigma, w.get()));
    double norm;
    if (wm->a == 1.0) {
      norm = *std::max_element(w.get().begin(), w.get().end());
    } else {
      double b = wm->a / (wm->a - 1.0);
      double total = 0.0;
      for (double wi : w.get()) total += std::pow(wi, b);
      norm = std::pow(total, 1.0 / b);
    }
    return UncertaintySet::wasserstein(
        WassersteinBall(wm->p, wm->base(loc, sc), wm->eps * norm));
  }
  const auto& am = *prob.as_aggregation();
  std::vector<Distribution> marginals;
  for (double wi : w.get())
    if (wi > 0.0) marginals.push_back(am.marginal.scale(wi));
  require(!marginals.empty(), "portfolio: all weights are zero");
  return UncertaintySet::aggregation(AggregationSet(std::move(marginals), am.clip));
}

/// Worst-case objective value at fixed weights; the admissible kinds always
/// reduce exactly, so an inexact tag here indicates an internal error.
inline RobustResult worst_value(const PortfolioProblem& prob, const Weights& w) {
  UncertaintySet set = project(prob, w);
  RobustResult res = robust_lambda_quantile(set, prob.objective().lambda,
                                            prob.objective().kind, OptDirection::Sup);
  if (res.exactness != Exactness::Exact)
    throw numerical_error("portfolio worst value: reduction unexpectedly inexact");
  return res;
}

struct ProfilePoint {
  std::vector<double> w;
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
};

struct OptimizeResult {
  Weights weights;
  RobustResult result;
  std::vector<ProfilePoint> profile;
};

/// Minimize the worst-case value over the simplex. Two assets: uniform scan
/// of w₁ (ties resolved to the lowest index) plus golden-section refinement
/// around the best cell. Three or more: simplex-lattice scan for the profile
/// and downhill-simplex refinement, trial points projected onto the simplex.
inline OptimizeResult optimize(const PortfolioProblem& prob, int grid = 1001) {
  const std::size_t n = prob.assets();
  require(n >= 2, "portfolio optimize: needs at least two assets");
  require(grid >= 3, "portfolio optimize: grid too small");

  auto eval = [&](const std::vector<double>& wv) {
    return worst_value(prob, Weights(wv));
  };

  std::vector<ProfilePoint> profile;
  if (n == 2) {
    int best = 0;
    double best_val = kInf;
    for (int j = 0; j < grid; ++j) {
      double w1 = static_cast<double>(j) / (grid - 1);
      RobustResult r = eval({w1, 1.0 - w1});
      profile.push_back({{w1, 1.0 - w1}, r.value, r.exactness});
      if (r.value < best_val) {
        best_val = r.value;
        best = j;
      }
    }
    double lo = static_cast<double>(std::max(best - 1, 0)) / (grid - 1);
    double hi = static_cast<double>(std::min(best + 1, grid - 1)) / (grid - 1);
    auto line = [&](double w1) { return eval({w1, 1.0 - w1}).value; };
    double w1 = golden_section(line, lo, hi, 1e-6);
    if (line(w1) > best_val) w1 = static_cast<double>(best) / (grid - 1);
    Weights wbest({w1, 1.0 - w1});
    return {wbest, worst_value(prob, wbest), std::move(profile)};
  }

  // lattice resolution: largest m whose lattice size stays within the grid
  auto lattice_size = [&](std::size_t m) {
    double count = 1.0;
    for (std::size_t i = 1; i < n; ++i)
      count *= static_cast<double>(m + i) / static_cast<double>(i);
    return count;
  };
  std::size_t m = 1;
  while (lattice_size(m + 1) <= static_cast<double>(grid)) ++m;

  std::vector<double> best_w;
  double best_val = kInf;
  std::vector<double> point(n, 0.0);
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i,
                                                           std::size_t left) {
    if (i + 1 == n) {
      point[i] = static_cast<double>(left) / static_cast<double>(m);
      std::vector<double> w = point;
      RobustResult r = eval(w);
      profile.push_back({w, r.value, r.exactness});
      if (r.value < best_val) {
        best_val = r.value;
        best_w = w;
      }
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      point[i] = static_cast<double>(k) / static_cast<double>(m);
      walk(i + 1, left - k);
    }
  };
  walk(0, m);

  // refine from the lattice optimum and a few jittered restarts
  auto value_of = [&](const std::vector<double>& wv) { return eval(wv).value; };
  auto projector = [](std::vector<double>& v) { detail::project_simplex(v); };
  std::vector<std::vector<double>> starts{best_w,
                                          std::vector<double>(n, 1.0 / n)};
  std::mt19937_64 rng(0xd1cE5ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < 4; ++s) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& wi : w) sum += wi = -std::log(1.0 - unif(rng));
    for (auto& wi : w) wi /= sum;  // Dirichlet(1,...,1) sample
    starts.push_back(std::move(w));
  }
  for (auto& s0 : starts) {
    double fv = 0.0;
    auto w = nelder_mead(value_of, s0, 0.15, 1e-9, 400, &fv, projector);
    if (fv < best_val) {
      best_val = fv;
      best_w = w;
    }
  }
  Weights wbest(best_w);
  return {wbest, worst_value(prob, wbest), std::move(profile)};
}

/// Majorization (diversification) order via sorted partial sums. Equal-up-to-
/// permutation inputs compare both ways; the tie reports more_diversified.
enum class MajorizationOrder { LessDiversified, MoreDiversified, Incomparable };

inline const char* to_string(MajorizationOrder m) {
  switch (m) {
    case MajorizationOrder::LessDiversified: return "less_diversified";
    case MajorizationOrder::MoreDiversified: return "more_diversified";
    case MajorizationOrder::Incomparable: return "incomparable";
  }
  return "?";
}

inline MajorizationOrder majorization_compare(const Weights& gamma, const Weights& w) {
  require(gamma.size() == w.size(), "majorization: dimension mismatch");
  auto prefix = [](std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    std::partial_sum(v.begin(), v.end(), v.begin());
    return v;
  };
  std::vector<double> pg = prefix(gamma.get()), pw = prefix(w.get());
  bool g_below = true, w_below = true;
  for (std::size_t k = 0; k < pg.size(); ++k) {
    g_below &= pg[k] <= pw[k] + 1e-12;
    w_below &= pw[k] <= pg[k] + 1e-12;
  }
  if (g_below) return MajorizationOrder::MoreDiversified;
  if (w_below) return MajorizationOrder::LessDiversified;
  return MajorizationOrder::Incomparable;
}

}  // namespace rlq
