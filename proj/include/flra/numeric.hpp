#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

namespace flra::numeric {

struct Extremum {
  double x;
  double fx;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Stops when the bracket is narrower than rel_tol * |x| (or abs_tol).
template <typename F>
Extremum golden_maximize(F&& f, double lo, double hi, double rel_tol = 1e-9,
                         double abs_tol = 0.0) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500; ++it) {
    const double scale = std::abs(0.5 * (a + b));
    if (b - a <= std::max(rel_tol * scale, abs_tol)) break;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

template <typename F>
Extremum golden_minimize(F&& f, double lo, double hi, double rel_tol = 1e-9,
                         double abs_tol = 0.0) {
  auto r = golden_maximize([&](double x) { return -f(x); }, lo, hi, rel_tol, abs_tol);
  return {r.x, -r.fx};
}

/// Bisection for a sign change of f on [lo, hi], f(lo) < 0 <= f(hi) or the
/// reverse. Returns the endpoint of the final bracket on the f >= 0 side.
template <typename F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-12) {
  const bool rising = f(lo) < 0.0;
  for (int it = 0; it < 400; ++it) {
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0.0) == rising)
      lo = mid;
    else
      hi = mid;
  }
  return rising ? hi : lo;
}

}  // namespace flra::numeric
