#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rlq {

/// Positive/negative infinity sentinels. Infinite endpoints are always
/// represented by these values, never by large finite surrogates.
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool is_pos_inf(double x) { return std::isinf(x) && x > 0; }
inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0; }

/// Thrown when an iterative scheme fails to converge or an integral diverges.
/// Maps to CLI exit code 3.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on invalid parameters or violated theorem hypotheses
/// (e.g. an aggregation clip level incompatible with Λ). Maps to exit code 2.
class invalid_input : public std::invalid_argument {
 public:
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw invalid_input(msg);
}

/// |a-b| <= tol with infinities compared by sign.
inline bool close_abs(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= tol;
}

}  // namespace rlq
