#include "wageband/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wageband/errors.hpp"

namespace wageband {

namespace {

constexpr double kLogBranchWidth = 1e-9;

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(12);
  os << what << " (got " << value << ")";
  return os.str();
}

}  // namespace

std::string to_string(AbilityLaw law) {
  switch (law) {
    case AbilityLaw::Uniform:
      return "uniform";
  }
  return "uniform";
}

AbilityLaw ability_law_from_string(const std::string& name) {
  if (name == "uniform") return AbilityLaw::Uniform;
  throw DomainError("unsupported ability law '" + name + "' (only 'uniform' is available)");
}

std::string to_string(ModelVariant variant) {
  return variant == ModelVariant::Parametric ? "parametric" : "example";
}

void ModelParams::validate() const {
  // a = 1 is admitted: it is the upper end of the comparative-statics range
  // and every formula stays well defined there.
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError(describe("a must lie in [0, 1]", a));
  if (!(b >= 1.0)) throw DomainError(describe("b must be >= 1", b));
  if (!(beta > 0.0)) throw DomainError(describe("beta must be > 0", beta));
  if (!(A > 0.0)) throw DomainError(describe("A must be > 0", A));
  if (!(k > 0.0)) throw DomainError(describe("k must be > 0", k));
  if (!(q >= 0.0)) throw DomainError(describe("q must be >= 0", q));
  if (!(rho >= 0.0)) throw DomainError(describe("rho must be >= 0", rho));
  if (!(t_floor >= 0.0)) throw DomainError(describe("t_floor must be >= 0", t_floor));
  if (!(z_min >= 0.0)) throw DomainError(describe("z_min must be >= 0", z_min));
  if (!(z_min < z_max)) throw DomainError(describe("z_min must be below z_max", z_max));
  if (!std::isfinite(z_max)) throw DomainError("z_max must be finite");
  if (t_floor == 0.0 && rho >= 1.0 - kLogBranchWidth)
    throw DomainError("t_floor must be positive when rho >= 1 (wage utility diverges at 0)");
}

double wage_utility(double t, double rho) {
  if (!(t > 0.0)) throw DomainError(describe("wage utility needs a positive wage", t));
  if (std::abs(rho - 1.0) < kLogBranchWidth) return std::log(t);
  if (rho == 0.0) return t - 1.0;
  return std::expm1((1.0 - rho) * std::log(t)) / (1.0 - rho);
}

double wage_utility_derivative(double t, double rho) {
  if (!(t > 0.0)) throw DomainError(describe("wage utility needs a positive wage", t));
  if (rho == 0.0) return 1.0;
  return std::pow(t, -rho);
}

double education_cost(double s, double z, double beta, double b) {
  if (s < 0.0) throw DomainError(describe("education must be non-negative", s));
  if (z < 0.0) throw DomainError(describe("ability must be non-negative", z));
  if (s == 0.0) return 0.0;
  if (z == 0.0) return kInfiniteCost;
  return beta * std::pow(s, b) / z;
}

Model Model::parametric(const ModelParams& params) {
  params.validate();
  return Model(ModelVariant::Parametric, params);
}

Model Model::parametric_unchecked(const ModelParams& params) {
  return Model(ModelVariant::Parametric, params);
}

Model Model::quasilinear_example() {
  ModelParams p;
  p.a = 0.0;
  p.b = 2.0;
  p.q = 0.0;
  p.rho = 0.0;
  p.beta = 0.5;
  p.A = 1.0;
  p.k = 1.0;
  p.t_floor = 1.0;
  p.z_min = 0.0;
  p.z_max = 3.0;
  return Model(ModelVariant::QuasilinearExample, p);
}

double Model::wage_utility(double t) const {
  if (is_example()) return t - 1.0;
  return wageband::wage_utility(t, params_.rho);
}

double Model::wage_utility_derivative(double t) const {
  if (is_example()) return 1.0;
  return wageband::wage_utility_derivative(t, params_.rho);
}

double Model::education_cost(double s, double z) const {
  if (is_example()) {
    if (s < 0.0) throw DomainError(describe("education must be non-negative", s));
    if (z < 0.0) throw DomainError(describe("ability must be non-negative", z));
    if (s == 0.0) return 0.0;
    if (z == 0.0) return kInfiniteCost;
    return s * s / (2.0 * z);
  }
  return wageband::education_cost(s, z, params_.beta, params_.b);
}

double Model::utility(double t, double s, double z) const {
  return wage_utility(t) - education_cost(s, z);
}

double Model::production(double x, double s, double z) const {
  if (is_example()) return 2.0 * z + 1.0;
  const double sa = (params_.a == 0.0) ? 1.0 : std::pow(s, params_.a);
  return params_.A * (sa + 1.0) * x * z + 1.0;
}

double Model::profit(double t, double x, double s, double z) const {
  return production(x, s, z) - t;
}

double Model::match(double z) const {
  if (z < 0.0) throw DomainError(describe("ability must be non-negative", z));
  if (is_example()) return 1.0;
  if (params_.q == 0.0) return params_.k;
  return params_.k * std::pow(z, params_.q);
}

Partials Model::partials(double t, double x, double s, double z) const {
  Partials d;
  if (is_example()) {
    d.u_t = 1.0;
    d.u_s = -s / z;
    d.g_t = -1.0;
    d.g_s = 0.0;
    d.g_z = 2.0;
    return d;
  }
  const auto& p = params_;
  d.u_t = wageband::wage_utility_derivative(t, p.rho);
  d.u_s = (s == 0.0 && p.b > 1.0) ? 0.0 : -p.beta * p.b * std::pow(s, p.b - 1.0) / z;
  d.g_t = -1.0;
  d.g_s = (p.a == 0.0) ? 0.0 : p.a * p.A * std::pow(s, p.a - 1.0) * x * z;
  const double sa = (p.a == 0.0) ? 1.0 : std::pow(s, p.a);
  d.g_z = p.A * (sa + 1.0) * x;
  return d;
}

double Model::kappa(double t, double z) const { return education_for_utility(t, z, 0.0); }

double Model::education_for_utility(double t, double z, double target) const {
  if (z < 0.0) throw DomainError(describe("ability must be non-negative", z));
  const double slack = wage_utility(t) - target;
  if (slack < 0.0) {
    // Absorb round-off when the target sits exactly at the zero-education utility.
    if (slack > -1e-13 * std::max(1.0, std::abs(target))) return 0.0;
    throw NoSolutionError(describe("no education level reaches the target utility; shortfall", slack));
  }
  if (z == 0.0 || slack == 0.0) return 0.0;
  if (is_example()) return std::sqrt(2.0 * z * slack);
  return std::pow(z * slack / params_.beta, 1.0 / params_.b);
}

double Model::cdf(double z) const {
  const double lo = params_.z_min, hi = params_.z_max;
  if (z <= lo) return 0.0;
  if (z >= hi) return 1.0;
  return (z - lo) / (hi - lo);
}

double Model::density(double z) const {
  const double lo = params_.z_min, hi = params_.z_max;
  if (z < lo || z > hi) return 0.0;
  return 1.0 / (hi - lo);
}

double Model::conditional_mean_ability(double z_cut) const {
  if (z_cut > params_.z_max)
    throw DomainError(describe("conditioning ability exceeds the support", z_cut));
  const double lo = std::max(z_cut, params_.z_min);
  return 0.5 * (lo + params_.z_max);
}

double Model::expected_profit_above(double t, double x, double s, double z_cut) const {
  return profit(t, x, s, conditional_mean_ability(z_cut));
}

double Model::pooled_utility_integral(double t, double s, double z0, double z1) const {
  if (!(z1 > z0)) return 0.0;
  const double width = params_.z_max - params_.z_min;
  double value = (z1 - z0) * wage_utility(t);
  if (s > 0.0) {
    if (z0 <= 0.0) return -kInfiniteCost;
    const double coef = is_example() ? 0.5 * s * s : params_.beta * std::pow(s, params_.b);
    value -= coef * std::log(z1 / z0);
  }
  return value / width;
}

double Model::pooled_profit_integral(double t, double s, double z_cut, double z0,
                                     double z1) const {
  if (!(z1 > z0)) return 0.0;
  const double width = params_.z_max - params_.z_min;
  const double m = conditional_mean_ability(z_cut);
  if (is_example()) return (2.0 * m + 1.0 - t) * (z1 - z0) / width;
  const auto& p = params_;
  const double sa = (p.a == 0.0) ? 1.0 : std::pow(s, p.a);
  const double match_mass =
      p.k * (std::pow(z1, p.q + 1.0) - std::pow(z0, p.q + 1.0)) / (p.q + 1.0);
  return (p.A * (sa + 1.0) * m * match_mass + (1.0 - t) * (z1 - z0)) / width;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return !c.applicable || c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

/// Accumulates the worst violation of `value > 0` (strict) or `value >= -tol` (weak).
class SignCheck {
 public:
  SignCheck(std::string name, std::string description, bool strict)
      : check_{std::move(name), std::move(description), true, true, 0.0}, strict_(strict) {}

  void require_positive(double value) {
    if (!std::isfinite(value)) {
      check_.passed = false;
      check_.worst_violation = std::numeric_limits<double>::infinity();
      return;
    }
    const bool ok = strict_ ? value > 0.0 : value >= -kWeakTol;
    if (!ok) {
      check_.passed = false;
      check_.worst_violation = std::max(check_.worst_violation, -value);
    }
  }
  void require_zero(double value) {
    if (!(std::abs(value) <= kWeakTol)) {
      check_.passed = false;
      check_.worst_violation = std::max(check_.worst_violation, std::abs(value));
    }
  }
  AssumptionCheck finish(bool applicable = true) {
    check_.applicable = applicable;
    if (!applicable) {
      check_.passed = true;
      check_.worst_violation = 0.0;
    }
    return check_;
  }

 private:
  static constexpr double kWeakTol = 1e-10;
  AssumptionCheck check_;
  bool strict_;
};

}  // namespace

AssumptionReport validate_assumptions(const Model& model, int grid) {
  grid = std::max(grid, 3);
  const auto& p = model.params();
  const double t0 = p.t_floor > 0.0 ? p.t_floor : 1e-3;
  const double t1 = t0 + 4.0;
  const double s1 = 4.0;
  const double width = p.z_max - p.z_min;
  const double dt = (t1 - t0) / (grid - 1);
  const double ds = s1 / (grid - 1);
  const double dz = width / grid;
  const bool heterogeneous = !model.is_example();

  SignCheck u_s("A.u_decreasing_in_s", "u non-increasing in education", false);
  SignCheck u_t("A.u_increasing_in_t", "u strictly increasing in wage", true);
  SignCheck u_z("A.u_increasing_in_z", "u strictly increasing in ability for s > 0", true);
  SignCheck u_sc_sz("A.single_crossing_sz", "u has strictly increasing differences in (s, z)", true);
  SignCheck u_sc_tz("A.single_crossing_tz", "u has increasing differences in (t, z)", false);
  SignCheck u_dd_ts("A.decreasing_differences_ts", "u has decreasing differences in (t, s)", false);
  SignCheck g_x("B.g_increasing_in_x", "g strictly increasing in firm productivity", true);
  SignCheck g_z("B.g_increasing_in_z", "g strictly increasing in ability", true);
  SignCheck g_s("B.g_nondecreasing_in_s", "g non-decreasing in education", false);
  SignCheck g_t("B.g_decreasing_in_t", "g strictly decreasing in wage", true);
  SignCheck g_sm("B.g_supermodular_tsz", "g supermodular in (t, s, z)", false);
  SignCheck g_sc_zx("B.single_crossing_zx", "g has strictly increasing differences in (z, x)", true);
  SignCheck g_dd_ts("B.decreasing_differences_ts", "g has decreasing differences in (t, s)", false);
  SignCheck c_floor("C.g_nonnegative_at_floor", "g(t_floor, x, s, z) >= 0", false);
  SignCheck c_gt("C.g_concave_in_t", "g concave in wage", false);
  SignCheck c_u("C.u_concave_in_st", "u concave in (s, t)", false);
  SignCheck e_u("E.u_zero_at_bottom", "u(t_floor, 0, z_min) = 0", false);
  SignCheck e_g("E.g_zero_at_bottom_firm", "g(t_floor, x_min, 0, z) = 0 for all z", false);
  SignCheck e_sum("E.positive_joint_surplus", "g(t_floor, x, 0, z) + u(t_floor, 0, z) > 0", true);

  auto safe = [](auto&& fn) {
    try {
      return fn();
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  e_u.require_zero(safe([&] { return model.utility(t0, 0.0, p.z_min); }));

  for (int iz = 0; iz < grid; ++iz) {
    const double z = p.z_min + dz * (iz + 1);
    const double zl = z - 0.5 * dz;
    const double x = model.match(z);
    const double x_hi = x * 1.1 + 0.1;
    const double x_min = model.match(p.z_min);
    e_g.require_zero(safe([&] { return model.profit(t0, x_min, 0.0, z); }));
    e_sum.require_positive(
        safe([&] { return model.profit(t0, x_hi, 0.0, z) + model.utility(t0, 0.0, z); }));
    for (int it = 0; it < grid; ++it) {
      const double t = t0 + dt * it;
      const double th = t + 0.5 * dt;
      for (int is = 0; is < grid; ++is) {
        const double s = ds * is;
        const double sh = s + 0.5 * ds;
        const double u00 = safe([&] { return model.utility(t, s, z); });
        u_s.require_positive(u00 - safe([&] { return model.utility(t, sh, z); }));
        u_t.require_positive(safe([&] { return model.utility(th, s, z); }) - u00);
        if (s > 0.0) u_z.require_positive(u00 - safe([&] { return model.utility(t, s, zl); }));
        u_sc_sz.require_positive(safe([&] {
          return (model.utility(t, sh, z) - model.utility(t, s, z)) -
                 (model.utility(t, sh, zl) - model.utility(t, s, zl));
        }));
        u_sc_tz.require_positive(safe([&] {
          return (model.utility(th, s, z) - model.utility(t, s, z)) -
                 (model.utility(th, s, zl) - model.utility(t, s, zl));
        }));
        u_dd_ts.require_positive(safe([&] {
          return -((model.utility(th, sh, z) - model.utility(th, s, z)) -
                   (model.utility(t, sh, z) - model.utility(t, s, z)));
        }));

        const double g00 = model.profit(t, x, s, z);
        g_x.require_positive(model.profit(t, x_hi, s, z) - g00);
        g_z.require_positive(g00 - model.profit(t, x, s, zl));
        g_s.require_positive(model.profit(t, x, sh, z) - g00);
        g_t.require_positive(g00 - model.profit(th, x, s, z));
        g_sm.require_positive((model.profit(t, x, sh, z) - g00) -
                              (model.profit(t, x, sh, zl) - model.profit(t, x, s, zl)));
        g_sm.require_positive((model.profit(th, x, s, z) - model.profit(th, x, s, zl)) -
                              (g00 - model.profit(t, x, s, zl)));
        g_sc_zx.require_positive((model.profit(t, x_hi, s, z) - model.profit(t, x_hi, s, zl)) -
                                 (g00 - model.profit(t, x, s, zl)));
        g_dd_ts.require_positive(-((model.profit(th, x, sh, z) - model.profit(th, x, s, z)) -
                                   (model.profit(t, x, sh, z) - g00)));
        c_floor.require_positive(model.profit(t0, x, s, z));
        if (t > t0)
          c_gt.require_positive(-(model.profit(th, x, s, z) - 2.0 * g00 +
                                  model.profit(t - 0.5 * dt, x, s, z)));
        if (s > 0.0 && t > t0) {
          const double ht = 0.5 * dt, hs = 0.5 * std::min(ds, s);
          const double h_tt = safe([&] {
            return (model.utility(t + ht, s, z) - 2.0 * u00 + model.utility(t - ht, s, z)) /
                   (ht * ht);
          });
          const double h_ss = safe([&] {
            return (model.utility(t, s + hs, z) - 2.0 * u00 + model.utility(t, s - hs, z)) /
                   (hs * hs);
          });
          const double h_ts = safe([&] {
            return (model.utility(t + ht, s + hs, z) - model.utility(t + ht, s - hs, z) -
                    model.utility(t - ht, s + hs, z) + model.utility(t - ht, s - hs, z)) /
                   (4.0 * ht * hs);
          });
          const double scale = 1e-6 * (1.0 + std::abs(h_tt) + std::abs(h_ss));
          c_u.require_positive(-h_tt + scale);
          c_u.require_positive(-h_ss + scale);
          c_u.require_positive(h_tt * h_ss - h_ts * h_ts + scale * scale);
        }
      }
    }
  }

  AssumptionReport report;
  report.checks = {u_s.finish(),
                   u_t.finish(),
                   u_z.finish(),
                   u_sc_sz.finish(),
                   u_sc_tz.finish(),
                   u_dd_ts.finish(),
                   g_x.finish(heterogeneous),
                   g_z.finish(),
                   g_s.finish(),
                   g_t.finish(),
                   g_sm.finish(),
                   g_sc_zx.finish(heterogeneous),
                   g_dd_ts.finish(),
                   c_floor.finish(),
                   c_gt.finish(),
                   c_u.finish(),
                   e_u.finish(),
                   e_g.finish(heterogeneous),
                   e_sum.finish(heterogeneous)};
  return report;
}

}  // namespace wageband
