#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wageband/config.hpp"
#include "wageband/equilibrium.hpp"
#include "wageband/errors.hpp"
#include "wageband/io.hpp"
#include "wageband/optimizer.hpp"
#include "wageband/svg.hpp"
#include "wageband/welfare.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace wageband;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitConfig = 2;

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return io::round_significant(v);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

/// Flags as given on the command line; every set value overrides the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> out_dir;
  bool figures = false;
  std::optional<int> threads;
  std::optional<std::string> model;

  std::optional<double> t_lo, t_hi, z_lo, z_hi;
  std::optional<double> omega;
  std::optional<std::string> constraint;
  std::optional<int> grid;
  std::optional<int> refine_evals;
  std::optional<int> omegas;
  std::optional<int> points;

  std::string param;
  double from = 0.0, to = 1.0;
  int steps = 11;
};

int parse_threads_env() {
  const char* env = std::getenv("WAGE_BAND_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1 || n > 4096)
    throw ConfigError(std::string("WAGE_BAND_LAB_THREADS must be a positive integer, got '") + env +
                      "'");
  return static_cast<int>(n);
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
  if (o.model) {
    if (*o.model == "parametric") cfg.variant = ModelVariant::Parametric;
    else if (*o.model == "example") cfg.variant = ModelVariant::QuasilinearExample;
    else throw ConfigError("--model must be 'parametric' or 'example', got '" + *o.model + "'");
  }
  if (o.out_dir) cfg.output.dir = *o.out_dir;
  if (o.figures) cfg.output.figures = true;
  cfg.threads = o.threads ? *o.threads : parse_threads_env();
  if (cfg.threads < 1) throw ConfigError("--threads must be at least 1");
  if (o.t_lo) cfg.policy.t_lo = o.t_lo;
  if (o.t_hi) cfg.policy.t_hi = o.t_hi;
  if (o.z_lo) cfg.policy.z_lo = o.z_lo;
  if (o.z_hi) cfg.policy.z_hi = o.z_hi;
  if (o.omega) cfg.policy.omega = *o.omega;
  if (o.constraint) {
    try {
      cfg.policy.constraint = policy_constraint_from_string(*o.constraint);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--constraint: ") + e.what());
    }
  }
  if (o.grid) cfg.search.grid = *o.grid, cfg.search.frontier_grid = *o.grid;
  if (o.refine_evals) cfg.search.refine_evals = *o.refine_evals;
  if (o.omegas) cfg.search.frontier_omegas = *o.omegas;
  if (o.points) cfg.search.profile_points = *o.points;
  if (!(cfg.policy.omega >= 0.0 && cfg.policy.omega <= 1.0))
    throw ConfigError("omega must lie in [0, 1]");
  return cfg;
}

/// Fixed band from the policy settings; exactly one of a wage band (t_lo with
/// optional t_hi) or an ability band (z_lo and z_hi) must be present.
struct BandRequest {
  std::optional<WageBand> wage;
  std::optional<AbilityBand> ability;
  bool any() const { return wage || ability; }
};

BandRequest band_request(const RunConfig& cfg) {
  const auto& p = cfg.policy;
  const bool wage = p.t_lo || p.t_hi;
  const bool ability = p.z_lo || p.z_hi;
  if (wage && ability)
    throw ConfigError("give either a wage band (t_lo/t_hi) or an ability band (z_lo/z_hi), not both");
  BandRequest r;
  if (wage) {
    if (!p.t_lo) throw ConfigError("a wage band needs t_lo");
    r.wage = WageBand{*p.t_lo, p.t_hi.value_or(kUnboundedWage)};
  } else if (ability) {
    if (!p.z_lo || !p.z_hi) throw ConfigError("an ability band needs both z_lo and z_hi");
    r.ability = AbilityBand{*p.z_lo, *p.z_hi};
  }
  return r;
}

Equilibrium solve_request(const BandRequest& r, const Model& model, const PathOptions& opts) {
  if (r.wage) return solve_from_band(*r.wage, model, opts);
  return solve_from_thresholds(*r.ability, model, opts);
}

std::string csv_of(const auto& writer_fn) {
  std::ostringstream os;
  writer_fn(os);
  return os.str();
}

/// Path samples for plotting: s grid, tau(s), mu(s).
void path_figure(const Equilibrium& eq, const fs::path& file, const std::string& title) {
  std::vector<double> s, tau, mu;
  if (!eq.path.empty()) {
    for (const auto& n : eq.path.nodes()) {
      s.push_back(n.s);
      tau.push_back(n.tau);
      mu.push_back(n.mu);
    }
  }
  if (eq.pooling) {
    s.push_back(eq.pooling->s_hi);
    tau.push_back(eq.pooling->t_hi);
    mu.push_back(eq.pooling->z_hi);
  }
  svg::Plot plot(title, "education s", "value");
  plot.line(s, tau, "wage tau(s)").line(s, mu, "belief mu(s)");
  if (eq.pooling) plot.vline(eq.pooling->s_hi, "pooled education");
  io::write_file(file, plot.render());
}

ordered_json band_json(const AbilityBand& a, const WageBand& w) {
  ordered_json j;
  j["z_lo"] = number(a.z_lo);
  j["z_hi"] = number(a.z_hi);
  j["t_lo"] = number(w.t_lo);
  j["t_hi"] = number(w.t_hi);
  return j;
}

ordered_json report_json(const WelfareReport& r) {
  ordered_json j;
  j["omega"] = number(r.omega);
  j["R"] = number(r.R);
  j["S"] = number(r.S);
  j["W"] = number(r.W);
  return j;
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg) {
  const Model model = build_model(cfg);
  const BandRequest req = band_request(cfg);
  if (!req.any()) throw ConfigError("solve needs a band: --t-lo [--t-hi] or --z-lo --z-hi");
  const Equilibrium eq = solve_request(req, model, path_options(cfg));
  const fs::path out = cfg.output.dir;
  io::write_file(out / "equilibrium.json", to_json(eq, model));
  io::write_file(out / "path.csv", csv_of([&](std::ostream& os) { eq.path.write_csv(os); }));
  if (cfg.output.figures) path_figure(eq, out / "path.svg", "Separating path");
  std::cout << "kind=" << to_string(eq.kind) << " z_lo=" << io::format_number(eq.ability_band.z_lo)
            << " z_hi=" << io::format_number(eq.ability_band.z_hi)
            << " t_lo=" << io::format_number(eq.band.t_lo)
            << " t_hi=" << io::format_number(eq.band.t_hi) << "\n";
  return 0;
}

int cmd_optimize(const RunConfig& cfg) {
  const Model model = build_model(cfg);
  const SearchConfig sc = search_config(cfg);
  const OptimalPolicy best = optimize(cfg.policy.omega, cfg.policy.constraint, model, sc);
  const Equilibrium eq = solve_from_thresholds(best.ability_band, model, sc.path);

  ordered_json j;
  j["model"] = to_string(model.variant());
  j["constraint"] = to_string(best.constraint);
  j["kind"] = to_string(best.kind);
  j["band"] = band_json(best.ability_band, best.wage_band);
  j["welfare"] = report_json(best.report);
  j["grid_best_W"] = number(best.grid_best);
  j["evaluations"] = best.evaluations;
  j["grid"] = sc.grid;
  j["equilibrium"] = ordered_json::parse(to_json(eq, model));
  const fs::path out = cfg.output.dir;
  io::write_file(out / "optimal_policy.json", dump(j));
  if (cfg.output.figures) path_figure(eq, out / "optimal_path.svg", "Optimal-policy separating path");
  std::cout << "constraint=" << to_string(best.constraint) << " kind=" << to_string(best.kind)
            << " z_lo=" << io::format_number(best.ability_band.z_lo)
            << " z_hi=" << io::format_number(best.ability_band.z_hi)
            << " W=" << io::format_number(best.report.W) << "\n";
  return 0;
}

int cmd_frontier(const RunConfig& cfg) {
  const Model model = build_model(cfg);
  const SearchConfig sc = search_config(cfg);
  if (cfg.search.frontier_grid < 2) throw ConfigError("frontier grid must be at least 2");
  if (cfg.search.frontier_omegas < 2) throw ConfigError("frontier omegas must be at least 2");
  const FrontierResult fr =
      frontier(cfg.search.frontier_grid, model, sc, cfg.search.frontier_omegas);
  const fs::path out = cfg.output.dir;

  std::ostringstream poss;
  {
    io::CsvWriter w(poss, {"z_lo", "z_hi", "S", "R", "pareto"});
    for (const auto& p : fr.possibility) {
      w.cell(p.band.z_lo).cell(p.band.z_hi).cell(p.S).cell(p.R).cell(p.pareto ? "1" : "0");
      w.end_row();
    }
  }
  std::ostringstream front;
  {
    io::CsvWriter w(front, {"omega", "z_lo", "z_hi", "S", "R"});
    for (const auto& p : fr.frontier) {
      w.cell(p.omega).cell(p.band.z_lo).cell(p.band.z_hi).cell(p.S).cell(p.R);
      w.end_row();
    }
  }
  io::write_file(out / "possibility.csv", poss.str());
  io::write_file(out / "frontier.csv", front.str());

  ordered_json j;
  j["model"] = to_string(model.variant());
  j["grid"] = cfg.search.frontier_grid;
  j["omega_samples"] = cfg.search.frontier_omegas;
  j["possibility_points"] = fr.possibility.size();
  j["frontier_points"] = fr.frontier.size();
  j["convexity_tolerance"] = 1e-6;
  j["convexity_violations"] = fr.convexity_violations;
  j["worst_convexity_gap"] = number(fr.worst_convexity_gap);
  j["no_intervention"] = {{"S", number(fr.no_intervention_S)},
                          {"R", number(fr.no_intervention_R)},
                          {"strictly_inside", fr.no_intervention_interior}};
  io::write_file(out / "frontier.json", dump(j));

  if (cfg.output.figures) {
    std::vector<double> ps, pr, fs_, fr_;
    for (const auto& p : fr.possibility) ps.push_back(p.S), pr.push_back(p.R);
    for (const auto& p : fr.frontier) fs_.push_back(p.S), fr_.push_back(p.R);
    svg::Plot plot("Welfare possibility set", "worker surplus S", "firm surplus R");
    plot.scatter(ps, pr, "ability bands", "#1f77b4", 1.8)
        .line(fs_, fr_, "frontier", "#d62728")
        .scatter({fr.no_intervention_S}, {fr.no_intervention_R}, "no intervention", "#2ca02c", 5.0);
    io::write_file(out / "frontier.svg", plot.render());
  }
  std::cout << "possibility=" << fr.possibility.size() << " frontier=" << fr.frontier.size()
            << " convexity_violations=" << fr.convexity_violations
            << " no_intervention_inside=" << (fr.no_intervention_interior ? "true" : "false")
            << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const Overrides& o) {
  if (cfg.variant != ModelVariant::Parametric)
    throw ConfigError("sweep requires the parametric model");
  SweepParameter param;
  try {
    param = sweep_parameter_from_string(o.param);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("--param: ") + e.what());
  }
  if (o.steps < 1) throw ConfigError("--steps must be at least 1");
  if (!std::isfinite(o.from) || !std::isfinite(o.to)) throw ConfigError("--from/--to must be finite");
  std::vector<double> values;
  for (int i = 0; i < o.steps; ++i)
    values.push_back(o.steps == 1 ? o.from : o.from + (o.to - o.from) * i / (o.steps - 1));
  for (double v : values) {
    try {
      (void)Model::parametric(with_parameter(cfg.model, param, v));
    } catch (const DomainError& e) {
      throw ConfigError("sweep value " + io::format_number(v) + " for " + o.param + ": " + e.what());
    }
  }
  const SearchConfig sc = search_config(cfg);
  const auto rows = sweep(param, values, cfg.policy.omega, cfg.model, sc);
  const fs::path out = cfg.output.dir;
  io::write_file(out / "sweep.csv", sweep_csv(rows));
  io::write_file(out / "sweep.json", sweep_json(rows, cfg.policy.omega));

  if (cfg.output.figures) {
    std::vector<double> x, zl, zh, gf, gm;
    for (const auto& r : rows) {
      if (!r.error.empty()) continue;
      x.push_back(r.value);
      zl.push_back(r.z_lo);
      zh.push_back(r.z_hi);
      gf.push_back(r.gain_full_pct);
      gm.push_back(r.gain_minonly_pct);
    }
    svg::Plot th("Optimal ability thresholds vs " + o.param, o.param, "ability");
    th.line(x, zl, "z_lo").line(x, zh, "z_hi");
    io::write_file(out / "sweep_thresholds.svg", th.render());
    svg::Plot gains("Welfare gain vs no intervention", o.param, "gain (%)");
    gains.line(x, gf, "full wage band").line(x, gm, "minimum wage only");
    io::write_file(out / "sweep_gains.svg", gains.render());
  }
  int failures = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      std::cerr << "sweep: " << r.param << "=" << io::format_number(r.value) << ": " << r.error
                << "\n";
    }
  }
  std::cout << "rows=" << rows.size() << " failures=" << failures << "\n";
  return failures == static_cast<int>(rows.size()) ? kExitSolver : 0;
}

int cmd_profile(const RunConfig& cfg) {
  const Model model = build_model(cfg);
  const SearchConfig sc = search_config(cfg);
  if (cfg.search.profile_points < 2) throw ConfigError("profile points must be at least 2");
  const BandRequest req = band_request(cfg);
  Equilibrium policy;
  if (req.any()) {
    policy = solve_request(req, model, sc.path);
  } else {
    const OptimalPolicy best = optimize(cfg.policy.omega, cfg.policy.constraint, model, sc);
    policy = solve_from_thresholds(best.ability_band, model, sc.path);
  }
  const Equilibrium reference =
      solve_from_thresholds({model.z_min(), model.z_max()}, model, sc.path);
  const Profile up = worker_utility_profile(policy, reference, model, cfg.search.profile_points);
  const Profile fp = firm_profit_profile(policy, reference, model, cfg.search.profile_points);
  const OutcomeDistributions dp = outcome_distributions(policy, model);
  const OutcomeDistributions dr = outcome_distributions(reference, model);

  const fs::path out = cfg.output.dir;
  io::write_file(out / "utility_profile.csv", csv_of([&](std::ostream& os) { up.write_csv(os); }));
  io::write_file(out / "profit_profile.csv", csv_of([&](std::ostream& os) { fp.write_csv(os); }));
  io::write_file(out / "education_cdf.csv",
                 csv_of([&](std::ostream& os) { dp.education.write_csv(os); }));
  io::write_file(out / "wage_cdf.csv", csv_of([&](std::ostream& os) { dp.wage.write_csv(os); }));
  io::write_file(out / "education_cdf_reference.csv",
                 csv_of([&](std::ostream& os) { dr.education.write_csv(os); }));
  io::write_file(out / "wage_cdf_reference.csv",
                 csv_of([&](std::ostream& os) { dr.wage.write_csv(os); }));

  auto crossings = [](const Profile& p) {
    ordered_json a = ordered_json::array();
    for (double z : p.crossings) a.push_back(number(z));
    return a;
  };
  const WelfareReport rp = surpluses(policy, model, cfg.policy.omega);
  const WelfareReport rr = surpluses(reference, model, cfg.policy.omega);
  ordered_json j;
  j["model"] = to_string(model.variant());
  j["policy"] = band_json(policy.ability_band, policy.band);
  j["policy"]["kind"] = to_string(policy.kind);
  j["policy"]["welfare"] = report_json(rp);
  j["reference"] = band_json(reference.ability_band, reference.band);
  j["reference"]["kind"] = to_string(reference.kind);
  j["reference"]["welfare"] = report_json(rr);
  j["utility_crossings"] = crossings(up);
  j["profit_crossings"] = crossings(fp);
  io::write_file(out / "profile.json", dump(j));

  if (cfg.output.figures) {
    svg::Plot u("Worker utility by ability", "ability z", "utility");
    u.line(up.z, up.policy, "policy").line(up.z, up.reference, "no intervention");
    for (double z : up.crossings) u.vline(z, "");
    io::write_file(out / "utility_profile.svg", u.render());
    svg::Plot f("Firm profit by partner ability", "ability z", "profit");
    f.line(fp.z, fp.policy, "policy").line(fp.z, fp.reference, "no intervention");
    for (double z : fp.crossings) f.vline(z, "");
    io::write_file(out / "profit_profile.svg", f.render());
    svg::Plot e("Education distribution", "education s", "CDF");
    e.line(dp.education.point, dp.education.cdf, "policy")
        .line(dr.education.point, dr.education.cdf, "no intervention");
    io::write_file(out / "education_cdf.svg", e.render());
    svg::Plot w("Wage distribution", "wage t", "CDF");
    w.line(dp.wage.point, dp.wage.cdf, "policy").line(dr.wage.point, dr.wage.cdf, "no intervention");
    io::write_file(out / "wage_cdf.svg", w.render());
  }
  std::cout << "utility_crossings=" << up.crossings.size()
            << " profit_crossings=" << fp.crossings.size() << "\n";
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  Model model = Model::quasilinear_example();
  if (cfg.variant == ModelVariant::Parametric) {
    // Parameter restrictions are reported as a configuration error by
    // build_model; diagnostics on the raw economy are still useful, so fall
    // back to the unchecked constructor and report.
    try {
      model = Model::parametric(cfg.model);
    } catch (const DomainError& e) {
      std::cerr << "warning: " << e.what() << "\n";
      model = Model::parametric_unchecked(cfg.model);
    }
  }
  const AssumptionReport rep = validate_assumptions(model);
  ordered_json j;
  j["model"] = to_string(model.variant());
  j["all_passed"] = rep.all_passed();
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["description"] = c.description;
    e["applicable"] = c.applicable;
    e["passed"] = c.passed;
    e["worst_violation"] = number(c.worst_violation);
    checks.push_back(e);
  }
  j["checks"] = checks;
  io::write_file(fs::path(cfg.output.dir) / "validation.json", dump(j));
  for (const auto& c : rep.checks)
    std::cout << (c.applicable ? (c.passed ? "PASS " : "FAIL ") : "N/A  ") << c.name << "\n";
  return rep.all_passed() ? 0 : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  Overrides o;
  CLI::App app{"Wage-band labor-market equilibrium and policy laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default(false);
  app.add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out_dir, "output directory");
  app.add_flag("--figures", o.figures, "also write SVG figures");
  app.add_option("--threads", o.threads, "worker threads (default: $WAGE_BAND_LAB_THREADS or 1)");
  app.add_option("--model", o.model, "parametric | example");

  auto band_flags = [&](CLI::App* c) {
    c->add_option("--t-lo", o.t_lo, "minimum wage");
    c->add_option("--t-hi", o.t_hi, "maximum wage");
    c->add_option("--z-lo", o.z_lo, "lower ability threshold");
    c->add_option("--z-hi", o.z_hi, "upper ability threshold");
  };
  auto solve = app.add_subcommand("solve", "solve the equilibrium of one wage or ability band");
  band_flags(solve);
  auto opt = app.add_subcommand("optimize", "solve the optimal wage-band problem");
  opt->add_option("--omega", o.omega, "weight on firm surplus");
  opt->add_option("--constraint", o.constraint, "full | minwage | none");
  opt->add_option("--grid", o.grid, "grid points per axis");
  opt->add_option("--refine-evals", o.refine_evals, "local refinement budget");
  auto front = app.add_subcommand("frontier", "welfare possibility set and frontier");
  front->add_option("--grid", o.grid, "grid points per axis");
  front->add_option("--omegas", o.omegas, "number of weights tracing the frontier");
  auto sw = app.add_subcommand("sweep", "comparative statics over one parameter");
  sw->add_option("--param", o.param, "a | q | rho | b")->required();
  sw->add_option("--from", o.from, "first value")->required();
  sw->add_option("--to", o.to, "last value")->required();
  sw->add_option("--steps", o.steps, "number of values");
  sw->add_option("--omega", o.omega, "weight on firm surplus");
  sw->add_option("--grid", o.grid, "grid points per axis");
  sw->add_option("--refine-evals", o.refine_evals, "local refinement budget");
  auto prof = app.add_subcommand("profile", "utility/profit profiles and outcome distributions");
  band_flags(prof);
  prof->add_option("--omega", o.omega, "weight on firm surplus");
  prof->add_option("--constraint", o.constraint, "full | minwage | none");
  prof->add_option("--grid", o.grid, "grid points per axis");
  prof->add_option("--points", o.points, "ability grid points");
  auto val = app.add_subcommand("validate", "spot-check the model assumptions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve(o);
    if (solve->parsed()) return cmd_solve(cfg);
    if (opt->parsed()) return cmd_optimize(cfg);
    if (front->parsed()) return cmd_frontier(cfg);
    if (sw->parsed()) return cmd_sweep(cfg, o);
    if (prof->parsed()) return cmd_profile(cfg);
    if (val->parsed()) return cmd_validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
