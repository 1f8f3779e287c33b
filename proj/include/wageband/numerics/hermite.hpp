#pragma once

#include <cmath>

namespace wageband::numerics {

/// Slopes at both ends of one cubic Hermite segment.
struct SegmentSlopes {
  double d0;
  double d1;
};

/// Fritsch-Carlson limiter: shrinks the end slopes of a segment so the cubic
/// stays monotone when the data are. Non-finite slopes fall back to the secant.
inline SegmentSlopes monotone_slopes(double x0, double x1, double y0, double y1, double d0,
                                     double d1) {
  const double secant = (y1 - y0) / (x1 - x0);
  if (!std::isfinite(d0) || !std::isfinite(d1)) return {secant, secant};
  if (secant == 0.0) return {0.0, 0.0};
  if ((d0 < 0.0) != (secant < 0.0) && d0 != 0.0) d0 = 0.0;
  if ((d1 < 0.0) != (secant < 0.0) && d1 != 0.0) d1 = 0.0;
  const double alpha = d0 / secant;
  const double beta = d1 / secant;
  const double r2 = alpha * alpha + beta * beta;
  if (r2 > 9.0) {
    const double tau = 3.0 / std::sqrt(r2);
    d0 = tau * alpha * secant;
    d1 = tau * beta * secant;
  }
  return {d0, d1};
}

inline double hermite_value(double x0, double x1, double y0, double y1, SegmentSlopes d,
                            double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + h10 * h * d.d0 + h01 * y1 + h11 * h * d.d1;
}

inline double hermite_derivative(double x0, double x1, double y0, double y1, SegmentSlopes d,
                                 double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double dh00 = (6.0 * t2 - 6.0 * t) / h;
  const double dh10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double dh01 = (-6.0 * t2 + 6.0 * t) / h;
  const double dh11 = 3.0 * t2 - 2.0 * t;
  return dh00 * y0 + dh10 * d.d0 + dh01 * y1 + dh11 * d.d1;
}

}  // namespace wageband::numerics
