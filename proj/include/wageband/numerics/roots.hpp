#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "wageband/errors.hpp"

namespace wageband::numerics {

struct RootOptions {
  double abs_tol = 1e-12;
  int max_iter = 200;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Brent's method (inverse quadratic interpolation with bisection fallback)
/// on a bracket [lo, hi] with f(lo) and f(hi) of opposite sign or zero.
template <class F>
RootResult brent_root(F&& f, double lo, double hi, RootOptions opt = {}) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os.precision(12);
    os << "root not bracketed on [" << lo << ", " << hi << "] (f = " << fa << ", " << fb << ")";
    throw BracketError(os.str());
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * opt.abs_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return {b, fb, iter};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return {b, fb, opt.max_iter};
}

/// Moves `far` geometrically away from `near` until f changes sign relative
/// to f(near). Returns the bracket as (near, far).
template <class F>
std::pair<double, double> expand_bracket(F&& f, double near, double far, int max_expansions = 80,
                                         double limit = std::numeric_limits<double>::infinity()) {
  const double f_near = f(near);
  double step = far - near;
  for (int i = 0; i < max_expansions; ++i) {
    const double f_far = f(far);
    if (std::isfinite(f_far) && (f_far > 0.0) != (f_near > 0.0)) return {near, far};
    step *= 2.0;
    far = near + step;
    if (std::abs(far) > limit) break;
  }
  std::ostringstream os;
  os.precision(12);
  os << "no sign change found expanding from " << near;
  throw BracketError(os.str());
}

struct ExtremumResult {
  double x = 0.0;
  double fx = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
ExtremumResult golden_section_max(F&& f, double lo, double hi, double tol = 1e-10,
                                  int max_iter = 200) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? ExtremumResult{x1, f1} : ExtremumResult{x2, f2};
}

}  // namespace wageband::numerics
