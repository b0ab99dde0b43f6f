#pragma once

/// Distribution catalog: Normal, Exponential, Uniform, Student-t, Pareto,
/// point mass and empirical samples, with cdf/left-limit/quantile evaluation,
/// closed-form survival integrals, reflection (law of -X), positive scaling,
/// and density-monotonicity certificates used by the aggregation envelopes.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rlq/numeric.hpp"
#include "rlq/numerics.hpp"
#include "rlq/special.hpp"

namespace rlq {

enum class Family { Normal, Exponential, Uniform, StudentT, Pareto, PointMass, Empirical };

enum class Side { Left, Right };

/// Density-monotonicity certificate. For the "beyond" classes the fields hold
/// the smallest clip level t such that the density is monotone (decreasing /
/// increasing) beyond the t-quantile; +inf when no level qualifies. For the
/// "below" classes they hold the largest admissible t; -inf when none.
struct DensityCertificate {
  double dec_beyond_min = kInf;
  double inc_beyond_min = kInf;
  double dec_below_max = -kInf;
  double inc_below_max = -kInf;

  bool beyond_decreasing_at(double t) const { return t >= dec_beyond_min; }
  bool beyond_increasing_at(double t) const { return t >= inc_beyond_min; }
  bool below_decreasing_at(double t) const { return t <= dec_below_max; }
  bool below_increasing_at(double t) const { return t <= inc_below_max; }
  bool any() const {
    return dec_beyond_min < kInf || inc_beyond_min < kInf ||
           dec_below_max > -kInf || inc_below_max > -kInf;
  }
};

class Distribution {
 public:
  // ---- factories ----
  static Distribution normal(double mu, double sigma) {
    require(sigma > 0, "normal: sigma must be positive");
    return Distribution(Family::Normal, {mu, sigma});
  }
  static Distribution exponential(double rate) {
    require(rate > 0, "exponential: rate must be positive");
    return Distribution(Family::Exponential, {rate});
  }
  static Distribution uniform(double a, double b) {
    require(a < b, "uniform: need a < b");
    return Distribution(Family::Uniform, {a, b});
  }
  static Distribution student_t(double tau, double loc = 0, double scale = 1) {
    require(tau > 0, "student_t: dof must be positive");
    require(scale > 0, "student_t: scale must be positive");
    return Distribution(Family::StudentT, {tau, loc, scale});
  }
  static Distribution pareto(double shape, double scale) {
    require(shape > 0 && scale > 0, "pareto: shape and scale must be positive");
    return Distribution(Family::Pareto, {shape, scale});
  }
  static Distribution point_mass(double c) { return Distribution(Family::PointMass, {c}); }
  static Distribution empirical(std::vector<double> samples) {
    require(!samples.empty(), "empirical: need at least one sample");
    std::sort(samples.begin(), samples.end());
    Distribution d(Family::Empirical, {});
    d.samples_ = std::move(samples);
    return d;
  }
  /// Plain text, one sample per line, `#` starts a comment, blank lines
  /// ignored.
  static Distribution empirical_from_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "empirical: cannot open " + path);
    std::vector<double> xs;
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      double v;
      if (ls >> v) xs.push_back(v);
    }
    require(!xs.empty(), "empirical: no samples in " + path);
    return empirical(std::move(xs));
  }

  Family family() const { return family_; }
  bool reflected() const { return reflected_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& samples() const { return samples_; }

  // ---- support ----
  double support_lo() const {
    if (reflected_) return -base().support_hi();
    switch (family_) {
      case Family::Normal:
      case Family::StudentT: return -kInf;
      case Family::Exponential: return 0.0;
      case Family::Uniform: return params_[0];
      case Family::Pareto: return params_[1];
      case Family::PointMass: return params_[0];
      case Family::Empirical: return samples_.front();
    }
    return -kInf;
  }
  double support_hi() const {
    if (reflected_) return -base().support_lo();
    switch (family_) {
      case Family::Normal:
      case Family::StudentT:
      case Family::Exponential:
      case Family::Pareto: return kInf;
      case Family::Uniform: return params_[1];
      case Family::PointMass: return params_[0];
      case Family::Empirical: return samples_.back();
    }
    return kInf;
  }

  // ---- evaluation ----
  double cdf(double x) const {
    if (std::isnan(x)) return kNaN;
    if (reflected_) return 1.0 - base().cdf(-x);  // continuous base families only
    switch (family_) {
      case Family::Normal: return norm_cdf((x - params_[0]) / params_[1]);
      case Family::Exponential: return x <= 0 ? 0.0 : -std::expm1(-params_[0] * x);
      case Family::Uniform: {
        double a = params_[0], b = params_[1];
        return x <= a ? 0.0 : (x >= b ? 1.0 : (x - a) / (b - a));
      }
      case Family::StudentT: return student_t_cdf((x - params_[1]) / params_[2], params_[0]);
      case Family::Pareto: {
        double k = params_[0], xm = params_[1];
        return x <= xm ? 0.0 : 1.0 - std::pow(xm / x, k);
      }
      case Family::PointMass: return x >= params_[0] ? 1.0 : 0.0;
      case Family::Empirical: {
        auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
        return static_cast<double>(it - samples_.begin()) / samples_.size();
      }
    }
    return kNaN;
  }

  /// Left limit F(x-).
  double cdf_left(double x) const {
    switch (family_) {
      case Family::PointMass: return x > params_[0] ? 1.0 : 0.0;
      case Family::Empirical: {
        auto it = std::lower_bound(samples_.begin(), samples_.end(), x);
        return static_cast<double>(it - samples_.begin()) / samples_.size();
      }
      default: return cdf(x);  // continuous families (incl. reflected)
    }
  }

  /// Generalized inverse. Side::Left gives q_u^- = inf{x: F(x) >= u} with
  /// q_0^- = -inf; Side::Right gives q_u^+ = inf{x: F(x) > u} with q_1^+ = +inf.
  double quantile(double u, Side side) const {
    require(u >= 0.0 && u <= 1.0, "quantile: level outside [0,1]");
    if (side == Side::Left && u == 0.0) return -kInf;
    if (side == Side::Right && u == 1.0) return kInf;
    if (side == Side::Left && u == 1.0) return support_hi();
    if (side == Side::Right && u == 0.0) return support_lo();
    if (reflected_)
      return -base().quantile(1.0 - u, side == Side::Left ? Side::Right : Side::Left);
    switch (family_) {
      case Family::Normal: return params_[0] + params_[1] * norm_quantile(u);
      case Family::Exponential: return -std::log1p(-u) / params_[0];
      case Family::Uniform: return params_[0] + u * (params_[1] - params_[0]);
      case Family::StudentT:
        return params_[1] + params_[2] * student_t_quantile(u, params_[0]);
      case Family::Pareto: return params_[1] * std::pow(1.0 - u, -1.0 / params_[0]);
      case Family::PointMass: return params_[0];
      case Family::Empirical: {
        std::size_t n = samples_.size();
        if (side == Side::Left) {
          auto k = static_cast<std::size_t>(std::ceil(u * n));
          if (k == 0) k = 1;
          return samples_[k - 1];
        }
        auto k = static_cast<std::size_t>(std::floor(u * n));
        return k >= n ? samples_.back() : samples_[k];
      }
    }
    return kNaN;
  }

  // ---- survival integral  ∫_a^b (1 - F) ----
  /// Closed forms per family; throws numerical_error when the integral
  /// diverges (a = -inf, or b = +inf with a non-integrable upper tail).
  double survival_integral(double a, double b) const {
    require(a <= b, "survival_integral: need a <= b");
    if (a == b) return 0.0;
    if (is_neg_inf(a))
      throw numerical_error("survival_integral: diverges at the lower endpoint");
    if (is_pos_inf(b) && !finite_upper_tail())
      throw numerical_error("survival_integral: upper tail is not integrable");
    if (reflected_) {
      // 1 - F_{-X}(y) = F_X(-y);  ∫_a^b F_X = (b-a) - ∫ (1-F_X).
      if (is_pos_inf(b)) {
        double hi = support_hi();  // integrand vanishes beyond the support
        return b <= hi ? 0.0 : survival_integral(a, std::max(a, hi));
      }
      return (b - a) - base().survival_integral(-b, -a);
    }
    switch (family_) {
      case Family::Normal: {
        double mu = params_[0], s = params_[1];
        auto excess = [&](double x) {
          if (is_pos_inf(x)) return 0.0;
          double z = (x - mu) / s;
          return norm_pdf(z) - z * norm_sf(z);
        };
        return s * (excess(a) - excess(b));
      }
      case Family::Exponential: {
        double r = params_[0];
        double below = std::max(0.0, std::min(b, 0.0) - a);
        double lo = std::max(a, 0.0), hi = std::max(b, 0.0);
        if (hi <= lo) return below;
        double tail = is_pos_inf(hi) ? std::exp(-r * lo) / r
                                     : (std::exp(-r * lo) - std::exp(-r * hi)) / r;
        return below + tail;
      }
      case Family::Uniform: {
        double lo = params_[0], hi = params_[1];
        double below = std::max(0.0, std::min(b, lo) - std::min(a, lo));
        double xa = std::clamp(a, lo, hi), xb = std::clamp(b, lo, hi);
        // 1-F is linear from 1 down to 0 on [lo, hi]: trapezoid.
        double mid = (xb - xa) * 0.5 * ((hi - xa) + (hi - xb)) / (hi - lo);
        return below + mid;
      }
      case Family::StudentT: {
        double tau = params_[0], loc = params_[1], s = params_[2];
        auto excess = [&](double x) {  // E[(T-z)_+], standard t, tau > 1
          if (is_pos_inf(x)) return 0.0;
          double z = (x - loc) / s;
          return (tau + z * z) / (tau - 1.0) * student_t_pdf(z, tau) -
                 z * (1.0 - student_t_cdf(z, tau));
        };
        return s * (excess(a) - excess(b));
      }
      case Family::Pareto: {
        double k = params_[0], xm = params_[1];
        double below = std::max(0.0, std::min(b, xm) - std::min(a, xm));
        double lo = std::max(a, xm), hi = std::max(b, xm);
        if (hi <= lo) return below;
        double tail;
        if (k == 1.0)
          tail = is_pos_inf(hi) ? kInf : xm * (std::log(hi) - std::log(lo));
        else if (is_pos_inf(hi))
          tail = std::pow(xm, k) * std::pow(lo, 1.0 - k) / (k - 1.0);
        else
          tail = std::pow(xm, k) / (1.0 - k) *
                 (std::pow(hi, 1.0 - k) - std::pow(lo, 1.0 - k));
        return below + tail;
      }
      case Family::PointMass:
        return std::max(0.0, std::min(b, params_[0]) - a);
      case Family::Empirical: {
        double total = 0.0;
        double n = static_cast<double>(samples_.size());
        double prev = a;
        std::size_t k = std::lower_bound(samples_.begin(), samples_.end(), a) -
                        samples_.begin();  // samples strictly below a: index count
        // On (x_(k), x_(k+1)) the survival is 1 - k/n.
        for (; k < samples_.size() && samples_[k] < b; ++k) {
          double x = std::max(samples_[k], a);
          total += (x - prev) * (1.0 - static_cast<double>(k) / n);
          prev = x;
        }
        if (!is_pos_inf(b)) total += (b - prev) * (1.0 - static_cast<double>(k) / n);
        return total;
      }
    }
    return kNaN;
  }

  // ---- moments ----
  double mean() const {
    if (reflected_) return -base().mean();
    switch (family_) {
      case Family::Normal: return params_[0];
      case Family::Exponential: return 1.0 / params_[0];
      case Family::Uniform: return 0.5 * (params_[0] + params_[1]);
      case Family::StudentT:
        if (params_[0] <= 1)
          throw numerical_error("student_t: mean undefined for dof <= 1");
        return params_[1];
      case Family::Pareto:
        if (params_[0] <= 1)
          throw numerical_error("pareto: mean undefined for shape <= 1");
        return params_[0] * params_[1] / (params_[0] - 1.0);
      case Family::PointMass: return params_[0];
      case Family::Empirical:
        return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
               samples_.size();
    }
    return kNaN;
  }

  /// p-th absolute central moment E|X - EX|^p. Exact for finite samples and
  /// for p = 2 in every parametric family (reflection leaves the central
  /// moments unchanged); generic quantile-domain quadrature otherwise, which
  /// truncates the outer 1e-9 of each tail and so underestimates slowly
  /// decaying tails. Throws numerical_error when the moment diverges.
  double central_moment(double p) const {
    require(p >= 1, "central_moment: need p >= 1");
    if (family_ == Family::PointMass) return 0.0;
    const double m = mean();
    if (family_ == Family::Empirical) {
      double s = 0.0;
      for (double x : samples_) s += std::pow(std::fabs(x - m), p);
      return s / static_cast<double>(samples_.size());
    }
    if (p == 2.0) {
      const Distribution d = reflected_ ? base() : *this;
      switch (d.family_) {
        case Family::Normal: return d.params_[1] * d.params_[1];
        case Family::Exponential: return 1.0 / (d.params_[0] * d.params_[0]);
        case Family::Uniform: {
          double w = d.params_[1] - d.params_[0];
          return w * w / 12.0;
        }
        case Family::StudentT: {
          double tau = d.params_[0], s = d.params_[2];
          if (tau <= 2.0)
            throw numerical_error("student_t: second moment diverges for dof <= 2");
          return s * s * tau / (tau - 2.0);
        }
        case Family::Pareto: {
          double k = d.params_[0], xm = d.params_[1];
          if (k <= 2.0)
            throw numerical_error("pareto: second moment diverges for shape <= 2");
          return xm * xm * k / ((k - 1.0) * (k - 1.0) * (k - 2.0));
        }
        default: break;
      }
    }
    auto integrand = [&](double u) {
      return std::pow(std::fabs(quantile(u, Side::Left) - m), p);
    };
    return adaptive_simpson(integrand, 1e-9, 1.0 - 1e-9, 1e-10);
  }

  // ---- transforms ----
  /// Law of -X (right-continuous construction).
  Distribution reflect() const {
    if (reflected_) return base();
    switch (family_) {
      case Family::Normal: return normal(-params_[0], params_[1]);
      case Family::Uniform: return uniform(-params_[1], -params_[0]);
      case Family::StudentT: return student_t(params_[0], -params_[1], params_[2]);
      case Family::PointMass: return point_mass(-params_[0]);
      case Family::Empirical: {
        std::vector<double> neg(samples_.size());
        std::transform(samples_.rbegin(), samples_.rend(), neg.begin(),
                       [](double x) { return -x; });
        return empirical(std::move(neg));
      }
      case Family::Exponential:
      case Family::Pareto: {
        Distribution d = *this;
        d.reflected_ = true;
        return d;
      }
    }
    return *this;
  }

  /// Law of c*X for c > 0 (stays in-family).
  Distribution scale(double c) const {
    require(c > 0, "scale: factor must be positive");
    if (reflected_) {
      Distribution d = base().scale(c);
      d.reflected_ = true;
      return d;
    }
    switch (family_) {
      case Family::Normal: return normal(c * params_[0], c * params_[1]);
      case Family::Exponential: return exponential(params_[0] / c);
      case Family::Uniform: return uniform(c * params_[0], c * params_[1]);
      case Family::StudentT:
        return student_t(params_[0], c * params_[1], c * params_[2]);
      case Family::Pareto: return pareto(params_[0], c * params_[1]);
      case Family::PointMass: return point_mass(c * params_[0]);
      case Family::Empirical: {
        std::vector<double> xs = samples_;
        for (auto& x : xs) x *= c;
        return empirical(std::move(xs));
      }
    }
    return *this;
  }

  // ---- density-monotonicity certificate ----
  DensityCertificate certificate() const {
    DensityCertificate c;
    if (reflected_) {
      DensityCertificate b = base().certificate();
      c.dec_beyond_min = b.inc_below_max > -kInf ? 1.0 - b.inc_below_max : kInf;
      c.inc_beyond_min = b.dec_below_max > -kInf ? 1.0 - b.dec_below_max : kInf;
      c.dec_below_max = b.inc_beyond_min < kInf ? 1.0 - b.inc_beyond_min : -kInf;
      c.inc_below_max = b.dec_beyond_min < kInf ? 1.0 - b.dec_beyond_min : -kInf;
      return c;
    }
    switch (family_) {
      case Family::Exponential:
      case Family::Pareto:  // decreasing density on the whole support
        c.dec_beyond_min = 0.0;
        c.dec_below_max = 1.0;
        break;
      case Family::Uniform:  // constant density is both
        c.dec_beyond_min = c.inc_beyond_min = 0.0;
        c.dec_below_max = c.inc_below_max = 1.0;
        break;
      case Family::Normal:
      case Family::StudentT:  // unimodal at the location parameter
        c.dec_beyond_min = 0.5;
        c.inc_below_max = 0.5;
        break;
      case Family::PointMass:
      case Family::Empirical: break;  // no density
    }
    return c;
  }

  bool continuous() const {
    return family_ != Family::PointMass && family_ != Family::Empirical;
  }

  std::string describe() const {
    std::ostringstream os;
    if (reflected_) os << "reflected ";
    switch (family_) {
      case Family::Normal: os << "norm:" << params_[0] << "," << params_[1]; break;
      case Family::Exponential: os << "exp:" << params_[0]; break;
      case Family::Uniform: os << "unif:" << params_[0] << "," << params_[1]; break;
      case Family::StudentT:
        os << "t:" << params_[0] << "," << params_[1] << "," << params_[2];
        break;
      case Family::Pareto: os << "pareto:" << params_[0] << "," << params_[1]; break;
      case Family::PointMass: os << "point:" << params_[0]; break;
      case Family::Empirical: os << "emp[n=" << samples_.size() << "]"; break;
    }
    return os.str();
  }

 private:
  Distribution(Family f, std::vector<double> p) : family_(f), params_(std::move(p)) {}

  Distribution base() const {
    Distribution d = *this;
    d.reflected_ = false;
    return d;
  }

  bool finite_upper_tail() const {
    if (reflected_) return true;  // right end of -X is -support_lo, bounded tail mass
    switch (family_) {
      case Family::Pareto: return params_[0] > 1.0;
      case Family::StudentT: return params_[0] > 1.0;
      default: return true;
    }
  }

  Family family_;
  std::vector<double> params_;
  std::vector<double> samples_;
  bool reflected_ = false;
};

}  // namespace rlq
