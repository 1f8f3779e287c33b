#pragma once

#include <limits>
#include <string>
#include <vector>

namespace wageband {

/// Marker returned for the cost of any positive education at zero ability.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

enum class AbilityLaw { Uniform };

std::string to_string(AbilityLaw law);
AbilityLaw ability_law_from_string(const std::string& name);

/// Economy primitives. Defaults are the baseline calibration.
struct ModelParams {
  double a = 0.5;        ///< education contribution to production
  double b = 2.0;        ///< education cost exponent
  double q = 1.0;        ///< firm heterogeneity exponent
  double rho = 0.0;      ///< elasticity of marginal utility of wage
  double beta = 0.5;     ///< education cost coefficient
  double A = 1.0;        ///< technology scale
  double k = 1.0;        ///< matching scale
  double t_floor = 1.0;  ///< subsistence wage
  double z_min = 0.0;
  double z_max = 3.0;
  AbilityLaw ability_law = AbilityLaw::Uniform;

  /// Throws DomainError naming the first violated restriction.
  void validate() const;
};

enum class ModelVariant { Parametric, QuasilinearExample };

std::string to_string(ModelVariant variant);

struct Partials {
  double u_t = 0.0;
  double u_s = 0.0;
  double g_t = 0.0;
  double g_s = 0.0;
  double g_z = 0.0;
};

/// Iso-elastic wage utility (t^{1-rho} - 1)/(1 - rho), ln t at rho = 1.
double wage_utility(double t, double rho);
/// Derivative of wage_utility in t.
double wage_utility_derivative(double t, double rho);
/// beta s^b / z; 0 at s = 0; kInfiniteCost for s > 0 at z = 0.
double education_cost(double s, double z, double beta, double b);

/// Worker utility u = h(t) - c(s, z), firm profit g = v(x, s, z) - t and the
/// assortative matching function n(z), in one of two concrete forms:
///  * Parametric: h iso-elastic, c = beta s^b / z, v = A (s^a + 1) x z + 1,
///    n(z) = k z^q.
///  * QuasilinearExample: u = t - 1 - s^2/(2z), homogeneous firms with
///    g = 2z + 1 - t, ability uniform on [0, 3].
/// All member functions are const and free of shared state.
class Model {
 public:
  static Model parametric(const ModelParams& params);
  /// Builds a parametric model without checking parameter restrictions; used
  /// to probe assumption diagnostics on deliberately invalid economies.
  static Model parametric_unchecked(const ModelParams& params);
  static Model quasilinear_example();

  ModelVariant variant() const { return variant_; }
  bool is_example() const { return variant_ == ModelVariant::QuasilinearExample; }
  /// For the example variant these are the parametric values it coincides
  /// with (a = 0, b = 2, q = 0, rho = 0, beta = 1/2, A = k = t_floor = 1).
  const ModelParams& params() const { return params_; }
  double z_min() const { return params_.z_min; }
  double z_max() const { return params_.z_max; }
  double t_floor() const { return params_.t_floor; }

  double wage_utility(double t) const;
  double wage_utility_derivative(double t) const;
  double education_cost(double s, double z) const;
  double utility(double t, double s, double z) const;
  double production(double x, double s, double z) const;
  double profit(double t, double x, double s, double z) const;
  double match(double z) const;
  Partials partials(double t, double x, double s, double z) const;

  /// Education that leaves ability z exactly indifferent to staying out at wage t.
  double kappa(double t, double z) const;
  /// Education s >= 0 with u(t, s, z) = target. Throws NoSolutionError when
  /// even s = 0 falls short of the target.
  double education_for_utility(double t, double z, double target) const;

  double cdf(double z) const;
  double density(double z) const;
  /// E[z' | z' >= z_cut] under the ability law.
  double conditional_mean_ability(double z_cut) const;
  /// E[g(t, x, s, z') | z' >= z_cut]; exact because profit is affine in z'.
  double expected_profit_above(double t, double x, double s, double z_cut) const;

  /// Integral over [z0, z1] of u(t, s, z) dG(z) for a fixed (t, s).
  double pooled_utility_integral(double t, double s, double z0, double z1) const;
  /// Integral over [z0, z1] of E[g(t, n(z), s, z') | z' >= z_cut] dG(z).
  double pooled_profit_integral(double t, double s, double z_cut, double z0, double z1) const;

 private:
  Model(ModelVariant variant, const ModelParams& params) : variant_(variant), params_(params) {}

  ModelVariant variant_;
  ModelParams params_;
};

struct AssumptionCheck {
  std::string name;
  std::string description;
  bool applicable = true;
  bool passed = true;
  double worst_violation = 0.0;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

/// Spot-checks the monotonicity, supermodularity, concavity and boundary
/// assumptions on an n x n x n grid of (t, s, z) using discrete differences.
/// Violations are reported, never thrown.
AssumptionReport validate_assumptions(const Model& model, int grid = 20);

}  // namespace wageband
