#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace specband {

//! log(1 + e^x) without overflow for large |x|.
inline double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

//! log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
  if (std::isinf(a) && a < 0.0) return b;
  if (std::isinf(b) && b < 0.0) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

//! log(sum_i e^{x_i}); returns -inf for an empty list.
inline double log_sum_exp(const std::vector<double>& xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(m) && m < 0.0) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

//! log(1 + A * e^B) for A > 0, evaluated as log(1 + e^{log A + B}) so the
//! product A*e^B never has to be formed.  A == 0 gives exactly 0.
inline double log1p_prod_exp(double log_a, double b) {
  if (std::isinf(log_a) && log_a < 0.0) return 0.0;
  return log1p_exp(log_a + b);
}

//! log of the binomial coefficient C(n, k) via lgamma.
inline double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

//! log of the falling factorial m * (m-1) * ... * (m-i+1) = m!/(m-i)!.
inline double log_falling_factorial(double m, double i) {
  return std::lgamma(m + 1.0) - std::lgamma(m - i + 1.0);
}

}  // namespace specband
