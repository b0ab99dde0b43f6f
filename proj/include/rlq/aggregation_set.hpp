#pragma once

/// Clipped extremal envelopes for the risk-aggregation set D_n(F_1,...,F_n):
/// sums X_1+...+X_n with fixed marginals and arbitrary dependence. The
/// worst-case tail is controlled by the dual bound
///   H(x) = inf_{Σ r_i < x} (1/(x-s)) Σ_i ∫_{r_i}^{x-s+r_i} (1-F_i(y)) dy,
/// s = Σ r_j, which equals the exact supremum of P(X_1+...+X_n ≥ x) when
/// every marginal density is monotone beyond its clip-level quantile. The
/// lower envelope is x ↦ t ∨ (1-H(x)); the upper envelope is obtained by
/// reflecting all marginals and re-expressing t ∧ H_reflected(-x) on the
/// original axis. Both are exact only beyond the clip level t.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rlq/curve.hpp"
#include "rlq/distribution.hpp"
#include "rlq/numeric.hpp"
#include "rlq/numerics.hpp"

namespace rlq {

/// Value of the dual bound at one point together with the minimizing shift
/// vector r (the optimizer trace).
struct DualBound {
  double value = 0.0;
  std::vector<double> minimizer;
};

class AggregationSet {
 public:
  explicit AggregationSet(std::vector<Distribution> marginals,
                          std::optional<double> clip = std::nullopt)
      : marginals_(std::move(marginals)), clip_(clip) {
    require(!marginals_.empty(), "aggregation set: needs at least one marginal");
    for (const auto& m : marginals_)
      require(m.family() != Family::Empirical,
              "aggregation set: marginal quantile functions must be continuous");
    if (clip_) require(*clip_ >= 0.0 && *clip_ < 1.0,
                       "aggregation set: clip level outside [0,1)");
  }

  std::size_t size() const { return marginals_.size(); }
  const std::vector<Distribution>& marginals() const { return marginals_; }
  std::optional<double> requested_clip() const { return clip_; }

  /// Dual upper bound on the worst-case tail probability P(sum ≥ x).
  double h_value(double x) const { return dual_bound(x).value; }

  DualBound dual_bound(double x) const {
    const std::size_t n = marginals_.size();
    if (n == 1) {
      // the averages of 1-F over [r, x) converge to the left limit
      return {1.0 - marginals_[0].cdf_left(x), {x}};
    }
    DualBound out = identical_marginals() ? symmetric_search(x) : full_search(x);
    out.value = std::clamp(out.value, 0.0, 1.0);
    return out;
  }

  /// Clip level used for the requested side: the caller-supplied level when
  /// present, otherwise the smallest (worst side) / largest (best side) level
  /// certified by every marginal's density-monotonicity certificate.
  double clip(EnvelopeSide side) const {
    if (clip_) return *clip_;
    if (side == EnvelopeSide::Lower) {
      double t_dec = 0.0, t_inc = 0.0;
      for (const auto& m : marginals_) {
        t_dec = std::max(t_dec, m.certificate().dec_beyond_min);
        t_inc = std::max(t_inc, m.certificate().inc_beyond_min);
      }
      double t = std::min(t_dec, t_inc);
      require(t < 1.0, "aggregation set: no marginal-wide tail certificate");
      return t;
    }
    double t_dec = 1.0, t_inc = 1.0;
    for (const auto& m : marginals_) {
      t_dec = std::min(t_dec, m.certificate().dec_below_max);
      t_inc = std::min(t_inc, m.certificate().inc_below_max);
    }
    double t = std::max(t_dec, t_inc);
    require(t > 0.0, "aggregation set: no marginal-wide head certificate");
    return t;
  }

  /// Clipped lower envelope x ↦ t ∨ (1-H(x)) or upper envelope
  /// x ↦ t ∧ H_reflected(-x); exact above (resp. below) the clip level only.
  MonotoneCurve envelope(EnvelopeSide side) const {
    double t = clip(side);
    check_certificates(side, t);
    if (side == EnvelopeSide::Lower) {
      auto self = *this;
      auto f = [self, t](double x) { return std::max(t, 1.0 - self.h_value(x)); };
      double lo = 0.0, hi = 0.0;
      for (const auto& m : marginals_) {
        lo += m.quantile(std::max(t, 0.5), Side::Left);
        hi += finite_quantile(m, 1.0 - 1e-9);
      }
      return MonotoneCurve::callable(f, std::min(lo, hi), std::max(lo, hi) + 1.0);
    }
    std::vector<Distribution> neg;
    neg.reserve(marginals_.size());
    for (const auto& m : marginals_) neg.push_back(m.reflect());
    AggregationSet mirror(std::move(neg));
    auto f = [mirror, t](double x) { return std::min(t, mirror.h_value(-x)); };
    double lo = 0.0, hi = 0.0;
    for (const auto& m : marginals_) {
      lo += finite_quantile(m, 1e-9);
      hi += m.quantile(std::min(t, 0.5), Side::Left);
    }
    return MonotoneCurve::callable(f, std::min(lo, hi) - 1.0, std::max(lo, hi));
  }

 private:
  static double finite_quantile(const Distribution& m, double u) {
    double q = m.quantile(u, Side::Left);
    if (is_neg_inf(q)) q = m.quantile(1e-12, Side::Right);
    if (is_pos_inf(q)) q = m.quantile(1.0 - 1e-12, Side::Left);
    return q;
  }

  void check_certificates(EnvelopeSide side, double t) const {
    bool all_dec = true, all_inc = true;
    std::size_t bad_dec = 0, bad_inc = 0;
    for (std::size_t i = 0; i < marginals_.size(); ++i) {
      const auto c = marginals_[i].certificate();
      bool dec_ok = side == EnvelopeSide::Lower ? t >= c.dec_beyond_min
                                                : t <= c.dec_below_max;
      bool inc_ok = side == EnvelopeSide::Lower ? t >= c.inc_beyond_min
                                                : t <= c.inc_below_max;
      if (all_dec && !dec_ok) { all_dec = false; bad_dec = i; }
      if (all_inc && !inc_ok) { all_inc = false; bad_inc = i; }
    }
    if (all_dec || all_inc) return;
    std::ostringstream os;
    std::size_t bad = bad_dec > bad_inc ? bad_inc : bad_dec;
    os << "aggregation envelope: marginal " << (bad + 1) << " ("
       << marginals_[bad].describe() << ") has no density-monotonicity "
       << "certificate at clip level " << t;
    throw invalid_input(os.str());
  }

  bool identical_marginals() const {
    for (std::size_t i = 1; i < marginals_.size(); ++i)
      if (!same_distribution(marginals_[0], marginals_[i])) return false;
    return true;
  }

  static bool same_distribution(const Distribution& a, const Distribution& b) {
    return a.family() == b.family() && a.reflected() == b.reflected() &&
           a.params() == b.params() && a.samples() == b.samples();
  }

  /// (1/w) ∫_r^{r+w} (1-F): the direct integral ratio cancels catastrophically
  /// as w -> 0 (absolute error ~1e-16 divided by w), which matters because the
  /// infimum of the dual objective often sits on the w -> 0 face. Below a
  /// scale-relative width switch to the trapezoid of the survival function,
  /// whose error is O(w^2 f') with no cancellation.
  static double window_average(const Distribution& m, double r, double w) {
    if (w < 1e-7 * (1.0 + std::fabs(r)))
      return 1.0 - 0.5 * (m.cdf(r) + m.cdf(r + w));
    return m.survival_integral(r, r + w) / w;
  }

  /// Objective for identical marginals at symmetric shifts r_i = c:
  /// n/(x-nc) · ∫_c^{x-(n-1)c} (1-F); +inf outside the feasible half-line.
  double symmetric_objective(double c, double x) const {
    const double n = static_cast<double>(marginals_.size());
    double width = x - n * c;
    if (width <= 0.0) return kInf;
    return n * window_average(marginals_[0], c, width);
  }

  DualBound symmetric_search(double x) const {
    const double n = static_cast<double>(marginals_.size());
    const auto& F = marginals_[0];
    double a = finite_quantile(F, 1e-6), b = finite_quantile(F, 1.0 - 1e-6);
    double span = std::max(b - a, 1.0);
    double lo = a - span, hi = x / n - 1e-12 * (std::abs(x) + 1.0);
    if (hi <= lo) lo = hi - span;
    auto obj = [&](double c) { return symmetric_objective(c, x); };
    // coarse localization, then golden-section inside the best bracket
    const int kGrid = 257;
    int best = 0;
    double best_val = kInf;
    for (int j = 0; j < kGrid; ++j) {
      double c = lo + (hi - lo) * j / (kGrid - 1);
      double v = obj(c);
      if (v < best_val) { best_val = v; best = j; }
    }
    double bl = lo + (hi - lo) * std::max(best - 1, 0) / (kGrid - 1);
    double br = lo + (hi - lo) * std::min(best + 1, kGrid - 1) / (kGrid - 1);
    double c_star = golden_section(obj, bl, br, 1e-12 * (std::abs(x) + span));
    double v_star = obj(c_star);
    if (best_val < v_star) { v_star = best_val; c_star = lo + (hi - lo) * best / (kGrid - 1); }
    return {v_star, std::vector<double>(marginals_.size(), c_star)};
  }

  double vector_objective(const std::vector<double>& r, double x) const {
    double s = 0.0;
    for (double ri : r) s += ri;
    double width = x - s;
    if (width <= 0.0) return kInf;
    double total = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      total += window_average(marginals_[i], r[i], width);
    return total;
  }

  DualBound full_search(double x) const {
    const std::size_t n = marginals_.size();
    std::vector<double> box_lo(n), box_hi(n);
    double span = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double a = finite_quantile(marginals_[i], 1e-6);
      double b = finite_quantile(marginals_[i], 1.0 - 1e-6);
      span = std::max(span, b - a);
      box_lo[i] = a;
    }
    for (auto& v : box_lo) v -= span;
    // only the sum is constrained (sum r_i < x): one coordinate may run all
    // the way to x minus the least the others can contribute
    double lo_sum = 0.0;
    for (double v : box_lo) lo_sum += v;
    for (std::size_t i = 0; i < n; ++i) box_hi[i] = x - (lo_sum - box_lo[i]);
    const double margin = 1e-12 * (std::abs(x) + 1.0);
    auto project = [&](std::vector<double>& r) {
      for (std::size_t i = 0; i < n; ++i) r[i] = std::clamp(r[i], box_lo[i], box_hi[i]);
      double s = 0.0;
      for (double ri : r) s += ri;
      if (s >= x - margin) {
        double shift = (s - (x - margin)) / static_cast<double>(n) + margin;
        for (auto& ri : r) ri -= shift;
      }
    };
    auto obj = [&](const std::vector<double>& r) { return vector_objective(r, x); };

    std::vector<std::vector<double>> starts;
    for (double u : {0.25, 0.5, 0.75, 0.9}) {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = finite_quantile(marginals_[i], u);
      starts.push_back(std::move(r));
    }
    // deterministic lattice scan of the box; the objective has several basins
    // (including one on the w -> 0 face), so seed the local searches from the
    // best lattice points instead of trusting any single start
    {
      std::vector<std::pair<double, std::vector<double>>> scored;
      std::vector<double> r(n);
      const double fracs[] = {0.06, 0.28, 0.5, 0.72, 0.94};
      const std::size_t k = 5;
      double cells = std::pow(static_cast<double>(k), static_cast<double>(n));
      if (cells <= 1024.0) {
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
          for (std::size_t i = 0; i < n; ++i)
            r[i] = box_lo[i] + fracs[idx[i]] * (box_hi[i] - box_lo[i]);
          project(r);
          scored.emplace_back(obj(r), r);
          std::size_t d = 0;
          while (d < n && ++idx[d] == k) idx[d++] = 0;
          if (d == n) break;
        }
      } else {
        std::mt19937_64 lattice_rng(0xa11ceULL);
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        for (int t = 0; t < 512; ++t) {
          for (std::size_t i = 0; i < n; ++i)
            r[i] = box_lo[i] + fracs[pick(lattice_rng)] * (box_hi[i] - box_lo[i]);
          project(r);
          scored.emplace_back(obj(r), r);
        }
      }
      std::partial_sort(scored.begin(), scored.begin() + 4, scored.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; });
      for (int t = 0; t < 4; ++t) starts.push_back(scored[t].second);
    }
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while (starts.size() < 12) {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i)
        r[i] = box_lo[i] + unif(rng) * (box_hi[i] - box_lo[i]);
      starts.push_back(std::move(r));
    }

    DualBound best{kInf, std::vector<double>(n, 0.0)};
    for (auto& s0 : starts) {
      project(s0);
      double fbest = 0.0;
      auto r = nelder_mead(obj, s0, 0.1 * span, 1e-10, 400, &fbest, project);
      cyclic_refine(obj, r, box_lo, box_hi, x, margin, &fbest);
      if (fbest < best.value) best = {fbest, r};
    }
    // widen the box once when the minimizer rests on its lower face
    bool touching = false;
    for (std::size_t i = 0; i < n; ++i)
      touching |= best.minimizer[i] < box_lo[i] + 1e-6 * span;
    if (touching) {
      for (auto& v : box_lo) v -= span;
      double fbest = best.value;
      auto r = best.minimizer;
      cyclic_refine(obj, r, box_lo, box_hi, x, margin, &fbest);
      if (fbest < best.value) best = {fbest, r};
    }
    return best;
  }

  static void cyclic_refine(const std::function<double(const std::vector<double>&)>& obj,
                            std::vector<double>& r, const std::vector<double>& box_lo,
                            const std::vector<double>& box_hi, double x, double margin,
                            double* fbest) {
    const std::size_t n = r.size();
    for (int cycle = 0; cycle < 20; ++cycle) {
      double before = *fbest;
      for (std::size_t i = 0; i < n; ++i) {
        double others = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) others += r[j];
        double hi = std::min(box_hi[i], x - others - margin);
        if (hi <= box_lo[i]) continue;
        auto line = [&](double ri) {
          std::vector<double> trial = r;
          trial[i] = ri;
          return obj(trial);
        };
        double ri = golden_section(line, box_lo[i], hi, 1e-12 * (std::abs(x) + 1.0));
        double v = line(ri);
        if (v < *fbest) { *fbest = v; r[i] = ri; }
      }
      if (before - *fbest < 1e-10) break;
    }
  }

  std::vector<Distribution> marginals_;
  std::optional<double> clip_;
};

}  // namespace rlq
