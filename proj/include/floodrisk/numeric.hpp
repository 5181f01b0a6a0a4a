#pragma once

// Small numeric helpers shared across modules.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace floodrisk {

inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  if (std::isinf(m)) return m;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

// Bisection on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign (or
// zero). Iterates until the bracket cannot be halved further in double
// precision. Returns the midpoint of the final bracket.
template <class F>
double bisect_root(F&& f, double lo, double hi, int max_iter = 400) {
  double flo = f(lo);
  if (flo == 0) return lo;
  if (f(hi) == 0) return hi;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace floodrisk
