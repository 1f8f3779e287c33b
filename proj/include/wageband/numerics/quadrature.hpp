#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace wageband::numerics {

/// Composite Simpson rule on strictly increasing, possibly non-uniform
/// abscissae. Interval pairs use the exact three-point quadratic rule; an odd
/// trailing interval is integrated with the quadratic through its last three
/// points.
inline double simpson(std::span<const double> x, std::span<const double> f) {
  if (x.size() != f.size()) throw std::invalid_argument("simpson: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double hs = h0 + h1;
    total += hs / 6.0 *
             ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i + 1 < n) {
    // Last interval [x_{n-2}, x_{n-1}] from the parabola through the final three nodes.
    const double h0 = x[n - 2] - x[n - 3];
    const double h1 = x[n - 1] - x[n - 2];
    const double w2 = h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1));
    const double w1 = h1 * (h1 + 3.0 * h0) / (6.0 * h0);
    const double w0 = -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    total += w0 * f[n - 3] + w1 * f[n - 2] + w2 * f[n - 1];
  }
  return total;
}

/// Composite Simpson on a uniform grid of n + 1 samples (n even) with step h.
inline double simpson_uniform(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("simpson_uniform: need an odd sample count >= 3");
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) (i % 2 ? odd : even) += f[i];
  return h / 3.0 * (f.front() + 4.0 * odd + 2.0 * even + f.back());
}

}  // namespace wageband::numerics
