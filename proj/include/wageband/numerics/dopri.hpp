#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace wageband::numerics {

/// One Dormand-Prince 5(4) step with the 4th-order continuous extension.
/// `f(x, y, dy)` writes the derivative into dy. The FSAL derivative at the
/// step end is returned in `k[6]` so the driver can reuse it.
template <std::size_t N>
struct DormandPrinceStep {
  using State = std::array<double, N>;

  State y0{};
  State y1{};
  State err{};
  std::array<State, 7> k{};
  double x0 = 0.0;
  double h = 0.0;

  template <class F>
  void take(F&& f, double x, const State& y, const State& dy0, double step) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    x0 = x;
    h = step;
    y0 = y;
    k[0] = dy0;
    State t{};
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * a21 * k[0][i];
    f(x + c2 * h, t, k[1]);
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    f(x + c3 * h, t, k[2]);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    f(x + c4 * h, t, k[3]);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    f(x + c5 * h, t, k[4]);
    for (std::size_t i = 0; i < N; ++i)
      t[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                         a65 * k[4][i]);
    f(x + h, t, k[5]);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                          b6 * k[5][i]);
    f(x + h, y1, k[6]);
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                    e7 * k[6][i]);
  }

  /// RMS error norm scaled by mixed absolute/relative tolerance.
  double error_norm(double rel_tol, double abs_tol) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double r = err[i] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(N));
  }

  /// Dense output at x0 + theta*h, theta in [0, 1].
  State dense(double theta) const {
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    State out{};
    const double t1 = 1.0 - theta;
    for (std::size_t i = 0; i < N; ++i) {
      const double dy = y1[i] - y0[i];
      const double bspl = h * k[0][i] - dy;
      const double r5 = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                             d6 * k[5][i] + d7 * k[6][i]);
      const double r3 = dy - h * k[6][i] - bspl;
      out[i] = y0[i] + theta * (dy + t1 * (bspl + theta * (r3 + t1 * r5)));
    }
    return out;
  }
};

}  // namespace wageband::numerics
