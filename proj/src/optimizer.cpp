#include "wageband/optimizer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wageband/errors.hpp"
#include "wageband/io.hpp"
#include "wageband/numerics/nelder_mead.hpp"
#include "wageband/numerics/roots.hpp"

namespace wageband {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
/// is rethrown after all workers finish.
template <class F>
void parallel_for(int n, int threads, F&& fn) {
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

BandEvaluation from_equilibrium(const Equilibrium& eq, const Model& model, double omega) {
  BandEvaluation e;
  e.band = eq.ability_band;
  e.wage_band = eq.band;
  e.kind = eq.kind;
  e.report = surpluses(eq, model, omega);
  e.feasible = std::isfinite(e.report.R) && std::isfinite(e.report.S);
  return e;
}

double width(const AbilityBand& b) { return b.z_hi - b.z_lo; }

/// Strictly better, or tied within tol and wider.
bool improves(double w, const AbilityBand& band, double best_w, const AbilityBand& best_band,
              double tol) {
  if (w > best_w + tol) return true;
  if (w >= best_w - tol && width(band) > width(best_band)) return true;
  return false;
}

AbilityBand band_from_coords(double u, double lambda, const Model& model) {
  const double z_min = model.z_min(), z_max = model.z_max();
  u = std::clamp(u, 0.0, 1.0 - 1e-9);
  lambda = std::clamp(lambda, 0.0, 1.0);
  const double z_lo = z_min + u * (z_max - z_min);
  const double z_hi = lambda >= 1.0 ? z_max : z_lo + lambda * (z_max - z_lo);
  return {z_lo, z_hi};
}

OptimalPolicy finish(const BandEvaluation& best, PolicyConstraint c, double grid_best,
                     int evals) {
  OptimalPolicy p;
  p.ability_band = best.band;
  p.wage_band = best.wage_band;
  p.report = best.report;
  p.constraint = c;
  p.kind = best.kind;
  p.grid_best = grid_best;
  p.evaluations = evals;
  return p;
}

OptimalPolicy optimize_min_wage_only(double omega, const Model& model, const SearchConfig& cfg) {
  const int n = std::max(cfg.grid, 2);
  const double z_min = model.z_min(), z_max = model.z_max();
  std::vector<BandEvaluation> row(static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](int i) {
    const double z_lo = z_min + (z_max - z_min) * i / n;
    row[static_cast<std::size_t>(i)] = evaluate_band({z_lo, z_max}, model, omega, cfg.path);
  });
  int best_i = -1;
  for (int i = 0; i < n; ++i) {
    const auto& e = row[static_cast<std::size_t>(i)];
    if (!e.feasible) continue;
    if (best_i < 0 || improves(e.report.W, e.band, row[static_cast<std::size_t>(best_i)].report.W,
                               row[static_cast<std::size_t>(best_i)].band, cfg.tie_tol))
      best_i = i;
  }
  if (best_i < 0) throw InfeasibleError("no feasible minimum wage on the search grid");
  BandEvaluation best = row[static_cast<std::size_t>(best_i)];
  const double grid_best = best.report.W;
  int evals = n;
  const double step = (z_max - z_min) / n;
  const double lo = std::max(z_min, z_min + step * (best_i - 1));
  const double hi = std::min(z_max - 1e-9 * (z_max - z_min), z_min + step * (best_i + 1));
  if (cfg.refine_evals > 0 && hi > lo) {
    BandEvaluation found = best;
    auto objective = [&](double z_lo) {
      ++evals;
      const BandEvaluation e = evaluate_band({z_lo, z_max}, model, omega, cfg.path);
      if (!e.feasible) return kNegInf;
      if (improves(e.report.W, e.band, found.report.W, found.band, cfg.tie_tol)) found = e;
      return e.report.W;
    };
    numerics::golden_section_max(objective, lo, hi, 1e-9, std::max(cfg.refine_evals - 2, 1));
    if (found.report.W > best.report.W) best = found;
  }
  return finish(best, PolicyConstraint::MinWageOnly, grid_best, evals);
}

}  // namespace

std::string to_string(PolicyConstraint c) {
  switch (c) {
    case PolicyConstraint::Full:
      return "full";
    case PolicyConstraint::MinWageOnly:
      return "minwage";
    case PolicyConstraint::NoIntervention:
      return "none";
  }
  return "full";
}

PolicyConstraint policy_constraint_from_string(const std::string& name) {
  if (name == "full") return PolicyConstraint::Full;
  if (name == "minwage" || name == "min-wage-only" || name == "minonly")
    return PolicyConstraint::MinWageOnly;
  if (name == "none" || name == "no-intervention") return PolicyConstraint::NoIntervention;
  throw DomainError("unknown policy constraint '" + name + "' (expected full, minwage or none)");
}

BandEvaluation evaluate_band(const AbilityBand& band, const Model& model, double omega,
                             const PathOptions& options) {
  try {
    return from_equilibrium(solve_from_thresholds(band, model, options), model, omega);
  } catch (const Error&) {
    BandEvaluation e;
    e.band = band;
    e.feasible = false;
    return e;
  }
}

std::vector<BandEvaluation> evaluate_grid(int grid, const Model& model, const SearchConfig& cfg) {
  const int n = std::max(grid, 2);
  std::vector<BandEvaluation> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](int i) {
    const double u = static_cast<double>(i) / n;
    const double z_lo = band_from_coords(u, 0.0, model).z_lo;
    std::optional<SeparatingPath> full;
    try {
      full = integrate_path(bottom_from_ability(z_lo, model), model.z_max(), model, cfg.path);
    } catch (const Error&) {
      full.reset();
    }
    for (int j = 0; j < n; ++j) {
      const AbilityBand band = band_from_coords(u, static_cast<double>(j) / (n - 1), model);
      BandEvaluation e;
      e.band = band;
      try {
        const Equilibrium eq = full ? solve_from_thresholds(band, *full, model)
                                    : solve_from_thresholds(band, model, cfg.path);
        e = from_equilibrium(eq, model, 0.0);
      } catch (const Error&) {
        e.feasible = false;
      }
      out[static_cast<std::size_t>(i) * n + j] = e;
    }
  });
  return out;
}

OptimalPolicy optimize_from_grid(double omega, const std::vector<BandEvaluation>& grid,
                                 const Model& model, const SearchConfig& cfg) {
  int best_i = -1;
  double best_w = kNegInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid[i].feasible) continue;
    const double w = omega * grid[i].report.R + (1.0 - omega) * grid[i].report.S;
    if (best_i < 0 || improves(w, grid[i].band, best_w, grid[static_cast<std::size_t>(best_i)].band,
                               cfg.tie_tol)) {
      best_i = static_cast<int>(i);
      best_w = w;
    }
  }
  if (best_i < 0) throw InfeasibleError("every ability band on the search grid failed to solve");
  BandEvaluation best = grid[static_cast<std::size_t>(best_i)];
  best.report = reweight(best.report, omega);
  const double grid_best = best.report.W;
  int evals = static_cast<int>(grid.size());
  if (cfg.refine_evals > 0) {
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid.size()))));
    const double z_span = model.z_max() - model.z_min();
    const double lam_start = best.band.z_lo >= model.z_max()
                                 ? 0.0
                                 : width(best.band) / (model.z_max() - best.band.z_lo);
    const std::array<double, 2> start{(best.band.z_lo - model.z_min()) / z_span, lam_start};
    BandEvaluation found = best;
    auto objective = [&](const std::array<double, 2>& x) {
      const BandEvaluation e =
          evaluate_band(band_from_coords(x[0], x[1], model), model, omega, cfg.path);
      if (!e.feasible) return kNegInf;
      if (improves(e.report.W, e.band, found.report.W, found.band, cfg.tie_tol)) found = e;
      return e.report.W;
    };
    numerics::NelderMeadOptions opt;
    opt.max_evals = cfg.refine_evals;
    opt.initial_step = 1.0 / std::max(n, 2);
    opt.x_tol = 1e-9;
    opt.f_tol = 1e-13;
    const auto r = numerics::nelder_mead_max<2>(objective, start, opt);
    evals += r.evals;
    if (improves(found.report.W, found.band, best.report.W, best.band, cfg.tie_tol)) best = found;
  }
  return finish(best, PolicyConstraint::Full, grid_best, evals);
}

OptimalPolicy optimize(double omega, PolicyConstraint constraint, const Model& model,
                       const SearchConfig& cfg) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("omega must lie in [0, 1]");
  switch (constraint) {
    case PolicyConstraint::NoIntervention: {
      const BandEvaluation e =
          evaluate_band({model.z_min(), model.z_max()}, model, omega, cfg.path);
      if (!e.feasible) throw InfeasibleError("the unregulated equilibrium failed to solve");
      return finish(e, constraint, e.report.W, 1);
    }
    case PolicyConstraint::MinWageOnly:
      return optimize_min_wage_only(omega, model, cfg);
    case PolicyConstraint::Full:
      break;
  }
  return optimize_from_grid(omega, evaluate_grid(cfg.grid, model, cfg), model, cfg);
}

FrontierResult frontier(int resolution, const Model& model, const SearchConfig& cfg,
                        int omega_samples, double convexity_tol) {
  FrontierResult out;
  const auto grid = evaluate_grid(std::max(resolution, 2), model, cfg);
  for (const auto& e : grid)
    if (e.feasible) out.possibility.push_back({e.band, e.report.S, e.report.R, false});
  // Pareto flags: sort by S descending, sweep the running maximum of R.
  std::vector<std::size_t> order(out.possibility.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    const auto& a = out.possibility[l];
    const auto& b = out.possibility[r];
    if (a.S != b.S) return a.S > b.S;
    return a.R > b.R;
  });
  double best_r = kNegInf;
  for (std::size_t idx : order) {
    auto& p = out.possibility[idx];
    if (p.R > best_r) {
      p.pareto = true;
      best_r = p.R;
    }
  }

  const int m = std::max(omega_samples, 2);
  std::vector<SupportPoint> support;
  for (int k = 0; k < m; ++k) {
    const double omega = static_cast<double>(k) / (m - 1);
    const OptimalPolicy p = optimize_from_grid(omega, grid, model, cfg);
    support.push_back({omega, p.ability_band, p.report.S, p.report.R});
  }
  std::stable_sort(support.begin(), support.end(), [](const SupportPoint& a, const SupportPoint& b) {
    if (a.S != b.S) return a.S < b.S;
    return a.R > b.R;
  });
  for (const auto& p : support) {
    if (!out.frontier.empty()) {
      const auto& q = out.frontier.back();
      if (std::abs(p.S - q.S) <= 1e-9 * std::max(1.0, std::abs(q.S)) &&
          std::abs(p.R - q.R) <= 1e-9 * std::max(1.0, std::abs(q.R)))
        continue;
    }
    out.frontier.push_back(p);
  }
  for (std::size_t i = 1; i + 1 < out.frontier.size(); ++i) {
    const auto& l = out.frontier[i - 1];
    const auto& c = out.frontier[i];
    const auto& r = out.frontier[i + 1];
    if (!(r.S > l.S)) continue;
    const double chord = l.R + (r.R - l.R) * (c.S - l.S) / (r.S - l.S);
    const double gap = chord - c.R;
    out.worst_convexity_gap = std::max(out.worst_convexity_gap, gap);
    if (gap > convexity_tol) ++out.convexity_violations;
  }

  const BandEvaluation none = evaluate_band({model.z_min(), model.z_max()}, model, 0.0, cfg.path);
  out.no_intervention_S = none.report.S;
  out.no_intervention_R = none.report.R;
  auto dominates = [&](double s, double r) {
    return s > none.report.S + 1e-9 && r > none.report.R + 1e-9;
  };
  for (const auto& p : out.possibility)
    if (dominates(p.S, p.R)) out.no_intervention_interior = true;
  for (const auto& p : out.frontier)
    if (dominates(p.S, p.R)) out.no_intervention_interior = true;
  return out;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::a:
      return "a";
    case SweepParameter::q:
      return "q";
    case SweepParameter::rho:
      return "rho";
    case SweepParameter::b:
      return "b";
  }
  return "a";
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  if (name == "a") return SweepParameter::a;
  if (name == "q") return SweepParameter::q;
  if (name == "rho") return SweepParameter::rho;
  if (name == "b") return SweepParameter::b;
  throw DomainError("unknown sweep parameter '" + name + "' (expected a, q, rho or b)");
}

ModelParams with_parameter(ModelParams params, SweepParameter p, double value) {
  switch (p) {
    case SweepParameter::a:
      params.a = value;
      break;
    case SweepParameter::q:
      params.q = value;
      break;
    case SweepParameter::rho:
      params.rho = value;
      break;
    case SweepParameter::b:
      params.b = value;
      break;
  }
  return params;
}

std::vector<SweepRow> sweep(SweepParameter param, const std::vector<double>& values, double omega,
                            const ModelParams& base, const SearchConfig& cfg) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double v : values) {
    SweepRow row;
    row.param = to_string(param);
    row.value = v;
    try {
      const Model model = Model::parametric(with_parameter(base, param, v));
      const OptimalPolicy none = optimize(omega, PolicyConstraint::NoIntervention, model, cfg);
      OptimalPolicy full = optimize(omega, PolicyConstraint::Full, model, cfg);
      const OptimalPolicy minonly = optimize(omega, PolicyConstraint::MinWageOnly, model, cfg);
      // A min-wage-only policy is feasible for the full problem.
      if (minonly.report.W > full.report.W) full = minonly;
      row.z_lo = full.ability_band.z_lo;
      row.z_hi = full.ability_band.z_hi;
      row.t_lo = full.wage_band.t_lo;
      row.t_hi = full.wage_band.t_hi;
      row.W_full = full.report.W;
      row.W_minonly = std::max(minonly.report.W, none.report.W);
      row.W_none = none.report.W;
      row.minonly_z_lo = minonly.report.W >= none.report.W ? minonly.ability_band.z_lo
                                                           : model.z_min();
      const double scale = std::abs(row.W_none);
      row.gain_full_pct = 100.0 * (row.W_full - row.W_none) / scale;
      row.gain_minonly_pct = 100.0 * (row.W_minonly - row.W_none) / scale;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.z_lo = row.z_hi = row.t_lo = row.t_hi = nan;
      row.W_full = row.W_minonly = row.W_none = nan;
      row.gain_full_pct = row.gain_minonly_pct = row.minonly_z_lo = nan;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<WelfareGain> welfare_improvement(SweepParameter param, const std::vector<double>& values,
                                             double omega, const ModelParams& base,
                                             const SearchConfig& cfg) {
  std::vector<WelfareGain> out;
  for (const auto& r : sweep(param, values, omega, base, cfg))
    out.push_back({r.value, r.gain_full_pct, r.gain_minonly_pct, r.error});
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  io::CsvWriter csv(os, {"param", "value", "z_lo", "z_hi", "t_lo", "t_hi", "W_full", "W_minonly",
                         "W_none", "gain_full_pct", "gain_minonly_pct"});
  for (const auto& r : rows) {
    csv.cell(r.param).cell(r.value).cell(r.z_lo).cell(r.z_hi).cell(r.t_lo).cell(r.t_hi);
    csv.cell(r.W_full).cell(r.W_minonly).cell(r.W_none).cell(r.gain_full_pct);
    csv.cell(r.gain_minonly_pct);
    csv.end_row();
  }
  return os.str();
}

std::string sweep_json(const std::vector<SweepRow>& rows, double omega) {
  using nlohmann::ordered_json;
  auto number = [](double v) -> ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return io::round_significant(v);
  };
  ordered_json j;
  j["omega"] = number(omega);
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json o;
    o["param"] = r.param;
    o["value"] = number(r.value);
    o["z_lo"] = number(r.z_lo);
    o["z_hi"] = number(r.z_hi);
    o["t_lo"] = number(r.t_lo);
    o["t_hi"] = number(r.t_hi);
    o["W_full"] = number(r.W_full);
    o["W_minonly"] = number(r.W_minonly);
    o["W_none"] = number(r.W_none);
    o["gain_full_pct"] = number(r.gain_full_pct);
    o["gain_minonly_pct"] = number(r.gain_minonly_pct);
    o["minonly_z_lo"] = number(r.minonly_z_lo);
    o["error"] = r.error.empty() ? ordered_json(nullptr) : ordered_json(r.error);
    arr.push_back(o);
  }
  j["rows"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace wageband
