#include "wageband/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wageband/errors.hpp"
#include "wageband/numerics/roots.hpp"

namespace wageband {

namespace {

constexpr double kHuge = 1e300;

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

/// Profit of a match between ability z_worker (held at her participation
/// education for wage t) and firm x, with the firm's ability assessment z_eval.
struct MatchObjective {
  const Model& model;
  double z_worker;
  double x;
  double z_eval;

  double education(double t) const { return model.kappa(t, z_worker); }

  double value(double t) const { return model.profit(t, x, education(t), z_eval); }

  double slope(double t) const {
    if (!(z_worker > 0.0)) return -1.0;
    const double s = education(t);
    const Partials d = model.partials(t, x, s, z_eval);
    const Partials w = model.partials(t, x, s, z_worker);
    if (d.g_s == 0.0) return d.g_t;
    if (w.u_s == 0.0) return kHuge;
    const double out = d.g_t + d.g_s * (w.u_t / -w.u_s);
    return std::isfinite(out) ? std::min(out, kHuge) : kHuge;
  }
};

/// Lowest wage at which a worker can be held to zero utility with s >= 0.
double wage_with_zero_utility(const Model& model) {
  const double t_floor = model.t_floor();
  if (t_floor > 0.0 && model.wage_utility(t_floor) >= 0.0) return t_floor;
  return std::max(t_floor, 1.0);
}

struct Argmax {
  double t;
  bool corner;
};

Argmax maximize(const MatchObjective& obj) {
  const double lo = wage_with_zero_utility(obj.model);
  if (obj.slope(lo) <= 0.0) return {lo, true};
  auto slope = [&](double t) { return obj.slope(t); };
  double hi = lo + 1.0;
  std::pair<double, double> br;
  try {
    br = numerics::expand_bracket(slope, lo, hi, 200, 1e15);
  } catch (const BracketError&) {
    throw NoSolutionError("match profit has no interior maximizer (slope stays positive from " +
                          num(lo) + ")");
  }
  numerics::RootOptions opt;
  opt.abs_tol = 1e-13;
  return {numerics::brent_root(slope, br.first, br.second, opt).x, false};
}

/// Larger root of obj.value above the maximizer t_max.
double root_above(const MatchObjective& obj, double t_max, const char* what) {
  auto value = [&](double t) { return obj.value(t); };
  const double v0 = value(t_max);
  if (v0 <= 0.0) return t_max;
  std::pair<double, double> br;
  try {
    br = numerics::expand_bracket(value, t_max, t_max + std::max(1.0, t_max), 200, 1e15);
  } catch (const BracketError&) {
    throw NoSolutionError(std::string(what) + ": profit stays positive for all wages above " +
                          num(t_max));
  }
  numerics::RootOptions opt;
  opt.abs_tol = 1e-13;
  return numerics::brent_root(value, br.first, br.second, opt).x;
}

MatchObjective bilateral_objective(double z, const Model& model) {
  return {model, z, model.match(z), z};
}

MatchObjective pooling_objective(double z, const Model& model) {
  return {model, z, model.match(z), model.conditional_mean_ability(z)};
}

}  // namespace

double match_value(double t, double z, const Model& model) {
  return bilateral_objective(z, model).value(t);
}

double match_value_slope(double t, double z, const Model& model) {
  return bilateral_objective(z, model).slope(t);
}

BilateralPair bilateral_efficient(double z, const Model& model) {
  if (z < model.z_min() || z > model.z_max())
    throw DomainError("ability " + num(z) + " outside the support");
  const auto obj = bilateral_objective(z, model);
  const Argmax m = maximize(obj);
  BilateralPair out;
  out.z = z;
  out.t = m.t;
  out.s = obj.education(m.t);
  out.value = obj.value(m.t);
  out.corner = m.corner;
  return out;
}

double t_hat(const Model& model) {
  const auto pair = bilateral_efficient(model.z_max(), model);
  if (!(pair.value > 0.0))
    throw BracketError("the top match is unprofitable at every wage; no market can form");
  return root_above(bilateral_objective(model.z_max(), model), pair.t, "t_hat");
}

BottomBoundary bottom_from_ability(double z_lo, const Model& model) {
  if (z_lo < model.z_min() || z_lo >= model.z_max())
    throw DomainError("entry ability " + num(z_lo) + " must lie in [z_min, z_max)");
  const auto pair = bilateral_efficient(z_lo, model);
  if (z_lo == model.z_min()) return {z_lo, pair.s, pair.t};
  if (pair.value < 0.0)
    throw NoSolutionError("no wage makes ability " + num(z_lo) + " a profitable entrant");
  const auto obj = bilateral_objective(z_lo, model);
  const double t = root_above(obj, pair.t, "bottom match");
  return {z_lo, obj.education(t), t};
}

BottomBoundary bottom_from_wage(double t_lo, const Model& model) {
  if (t_lo < model.t_floor())
    throw DomainError("minimum wage " + num(t_lo) + " below the subsistence wage");
  const double top = t_hat(model);
  if (t_lo >= top)
    throw EmptyMarketError("minimum wage " + num(t_lo) + " at or above t_hat = " + num(top) +
                           ": nobody enters");
  const auto base = bilateral_efficient(model.z_min(), model);
  if (t_lo <= base.t) return {model.z_min(), base.s, base.t};
  auto excess = [&](double z) { return match_value(t_lo, z, model); };
  if (excess(model.z_min()) >= 0.0)
    return {model.z_min(), model.kappa(t_lo, model.z_min()), t_lo};
  numerics::RootOptions opt;
  opt.abs_tol = 1e-13;
  const double z = numerics::brent_root(excess, model.z_min(), model.z_max(), opt).x;
  return {z, model.kappa(t_lo, z), t_lo};
}

ResidualPair bottom_residuals(const BottomBoundary& b, const Model& model) {
  return {model.utility(b.t_lo, b.s_lo, b.z_lo),
          model.profit(b.t_lo, model.match(b.z_lo), b.s_lo, b.z_lo)};
}

PoolingBlock top_from_ability(const SeparatingPath& path, double z_hi, const Model& model) {
  if (z_hi >= model.z_max())
    throw DegeneratePoolingError("pooling threshold " + num(z_hi) +
                                 " leaves no pooled workers (at or above z_max)");
  const double s_sep = path.sigma_of_z(z_hi);
  const double t_sep = path.tau_of_s(s_sep);
  const double x = model.match(z_hi);
  const double u_sep = model.utility(t_sep, s_sep, z_hi);
  const double g_sep = model.profit(t_sep, x, s_sep, z_hi);
  auto education = [&](double t) { return model.education_for_utility(t, z_hi, u_sep); };
  auto excess = [&](double t) {
    return model.expected_profit_above(t, x, education(t), z_hi) - g_sep;
  };
  const double f0 = excess(t_sep);
  if (f0 == 0.0) return {z_hi, s_sep, t_sep};
  if (f0 < 0.0)
    throw DegeneratePoolingError("pooling at " + num(z_hi) +
                                 " is less profitable than separating; no jump exists");
  std::pair<double, double> br;
  try {
    br = numerics::expand_bracket(excess, t_sep, t_sep + std::max(1.0, 0.5 * t_sep), 200, 1e15);
  } catch (const BracketError&) {
    throw DegeneratePoolingError("no pooled wage balances firm profit at threshold " + num(z_hi));
  }
  numerics::RootOptions opt;
  opt.abs_tol = 1e-13;
  const double t = numerics::brent_root(excess, br.first, br.second, opt).x;
  return {z_hi, education(t), t};
}

double t_hi_star(const SeparatingPath& path, const Model& model) {
  if (path.empty() || path.mu_max() < model.z_max() - 1e-9)
    throw RangeError("separating path is truncated before z_max");
  return path.tau_max();
}

PoolingBlock top_from_wage(const SeparatingPath& path, double t_hi, const Model& model) {
  const double upper = t_hi_star(path, model);
  const double z_lo = path.mu_min();
  const PoolingBlock lowest = top_from_ability(path, z_lo, model);
  if (t_hi == lowest.t_hi) return lowest;
  if (!(t_hi > lowest.t_hi && t_hi < upper))
    throw BandClassificationError("maximum wage " + num(t_hi) + " outside (" +
                                  num(lowest.t_hi) + ", " + num(upper) +
                                  ") where a pooling block attaches to the path");
  const double z_max = model.z_max();
  auto gap = [&](double z) {
    if (z >= z_max) return upper - t_hi;
    return top_from_ability(path, z, model).t_hi - t_hi;
  };
  numerics::RootOptions opt;
  opt.abs_tol = 1e-13;
  const double z = numerics::brent_root(gap, z_lo, z_max, opt).x;
  if (z >= z_max) throw BandClassificationError("maximum wage indistinguishable from t_hi_star");
  return top_from_ability(path, z, model);
}

ResidualPair pooling_block_residuals(const SeparatingPath& path, const PoolingBlock& block,
                                     const Model& model) {
  const double s_sep = path.sigma_of_z(block.z_hi);
  const double t_sep = path.tau_of_s(s_sep);
  const double x = model.match(block.z_hi);
  return {model.utility(block.t_hi, block.s_hi, block.z_hi) -
              model.utility(t_sep, s_sep, block.z_hi),
          model.expected_profit_above(block.t_hi, x, block.s_hi, block.z_hi) -
              model.profit(t_sep, x, s_sep, block.z_hi)};
}

double pooling_wage_limit(const Model& model) { return t_hat(model); }

PoolingSolution pooling_only(double t_single, const Model& model) {
  if (t_single < model.t_floor())
    throw DomainError("single wage " + num(t_single) + " below the subsistence wage");
  const double limit = pooling_wage_limit(model);
  if (t_single >= limit)
    throw NoSolutionError("single wage " + num(t_single) + " at or above the pooling limit " +
                          num(limit));
  auto excess = [&](double z) {
    return model.expected_profit_above(t_single, model.match(z), model.kappa(t_single, z), z);
  };
  const double z_min = model.z_min();
  const double e0 = excess(z_min);
  if (e0 >= 0.0) return {z_min, model.kappa(t_single, z_min), t_single, e0 > 0.0};
  numerics::RootOptions opt;
  opt.abs_tol = 1e-13;
  const double z = numerics::brent_root(excess, z_min, model.z_max(), opt).x;
  return {z, model.kappa(t_single, z), t_single, false};
}

PoolingSolution pooling_from_ability(double z, const Model& model) {
  if (z < model.z_min() || z >= model.z_max())
    throw DomainError("pooling threshold " + num(z) + " must lie in [z_min, z_max)");
  const auto obj = pooling_objective(z, model);
  const Argmax m = maximize(obj);
  if (obj.value(m.t) < 0.0)
    throw NoSolutionError("pooling with threshold " + num(z) + " is unprofitable at every wage");
  const double t = root_above(obj, m.t, "pooling");
  return {z, obj.education(t), t, false};
}

ResidualPair pooling_residuals(const PoolingSolution& sol, const Model& model) {
  if (sol.corner) return {0.0, 0.0};
  const double worker = sol.z_star > 0.0 ? model.utility(sol.t_star, sol.s_star, sol.z_star) : 0.0;
  return {worker, model.expected_profit_above(sol.t_star, model.match(sol.z_star), sol.s_star,
                                              sol.z_star)};
}

}  // namespace wageband
