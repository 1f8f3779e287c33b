#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace wageband::numerics {

struct NelderMeadOptions {
  int max_evals = 200;
  double initial_step = 0.05;
  double f_tol = 1e-12;
  double x_tol = 1e-9;
};

template <std::size_t N>
struct NelderMeadResult {
  std::array<double, N> x{};
  double fx = 0.0;
  int evals = 0;
};

/// Nelder-Mead maximization with standard coefficients (reflection 1,
/// expansion 2, contraction 0.5, shrink 0.5). `f` is responsible for any
/// feasibility clamping; returning -inf marks a point as infeasible. The
/// returned point is the best one ever evaluated, so the result never falls
/// below the starting value.
template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead_max(F&& f, const std::array<double, N>& start,
                                    NelderMeadOptions opt = {}) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> pts{};
  std::array<double, N + 1> vals{};
  int evals = 0;
  NelderMeadResult<N> best{start, f(start), 1};
  evals = 1;
  auto eval = [&](const Point& p) {
    const double v = f(p);
    ++evals;
    if (v > best.fx) {
      best.x = p;
      best.fx = v;
    }
    return v;
  };
  pts[0] = start;
  vals[0] = best.fx;
  for (std::size_t i = 0; i < N; ++i) {
    pts[i + 1] = start;
    pts[i + 1][i] += opt.initial_step;
    vals[i + 1] = eval(pts[i + 1]);
  }
  std::array<std::size_t, N + 1> order{};
  while (evals < opt.max_evals) {
    for (std::size_t i = 0; i <= N; ++i) order[i] = i;
    // Descending by value; stable on index for determinism.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return vals[l] > vals[r]; });
    const std::size_t ib = order[0], iw = order[N], isw = order[N - 1];
    double spread = 0.0;
    for (std::size_t i = 1; i <= N; ++i)
      for (std::size_t d = 0; d < N; ++d)
        spread = std::max(spread, std::abs(pts[order[i]][d] - pts[ib][d]));
    if (vals[ib] - vals[iw] <= opt.f_tol && spread <= opt.x_tol) break;
    if (spread <= opt.x_tol) break;

    Point centroid{};
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t d = 0; d < N; ++d) centroid[d] += pts[order[i]][d] / static_cast<double>(N);
    auto along = [&](double coef) {
      Point p{};
      for (std::size_t d = 0; d < N; ++d) p[d] = centroid[d] + coef * (pts[iw][d] - centroid[d]);
      return p;
    };
    const Point xr = along(-1.0);
    const double fr = eval(xr);
    if (fr > vals[ib]) {
      const Point xe = along(-2.0);
      const double fe = eval(xe);
      if (fe > fr) {
        pts[iw] = xe;
        vals[iw] = fe;
      } else {
        pts[iw] = xr;
        vals[iw] = fr;
      }
      continue;
    }
    if (fr > vals[isw]) {
      pts[iw] = xr;
      vals[iw] = fr;
      continue;
    }
    const bool outside = fr > vals[iw];
    const Point xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc > (outside ? fr : vals[iw])) {
      pts[iw] = xc;
      vals[iw] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= N && evals < opt.max_evals; ++i) {
      const std::size_t j = order[i];
      for (std::size_t d = 0; d < N; ++d) pts[j][d] = pts[ib][d] + 0.5 * (pts[j][d] - pts[ib][d]);
      vals[j] = eval(pts[j]);
    }
  }
  best.evals = evals;
  return best;
}

}  // namespace wageband::numerics
