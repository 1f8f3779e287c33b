#pragma once

#include <string>
#include <vector>

#include "wageband/equilibrium.hpp"
#include "wageband/welfare.hpp"

namespace wageband {

enum class PolicyConstraint { Full, MinWageOnly, NoIntervention };

std::string to_string(PolicyConstraint c);
PolicyConstraint policy_constraint_from_string(const std::string& name);

struct SearchConfig {
  /// Grid points per axis over (z_lo, lambda), lambda = (z_hi - z_lo)/(z_max - z_lo).
  int grid = 60;
  int refine_evals = 200;
  int threads = 1;
  /// Maximizers within this distance are ties; the wider band wins.
  double tie_tol = 1e-9;
  PathOptions path{};
};

struct OptimalPolicy {
  AbilityBand ability_band{};
  WageBand wage_band{};
  WelfareReport report{};
  PolicyConstraint constraint = PolicyConstraint::Full;
  EquilibriumKind kind = EquilibriumKind::Separating;
  double grid_best = 0.0;  ///< W at the best grid point before refinement
  int evaluations = 0;
};

/// One evaluated ability band.
struct BandEvaluation {
  AbilityBand band{};
  WageBand wage_band{};
  EquilibriumKind kind = EquilibriumKind::Separating;
  WelfareReport report{};  ///< report.omega is the weight used; R and S do not depend on it
  bool feasible = false;
};

/// Evaluates every (z_lo, lambda) grid point, one separating path per z_lo
/// row reused for all z_hi. Rows may run on several threads; results are
/// stored in row-major input order.
std::vector<BandEvaluation> evaluate_grid(int grid, const Model& model, const SearchConfig& config);

/// Welfare report of a single ability band, or infeasible on solver failure.
BandEvaluation evaluate_band(const AbilityBand& band, const Model& model, double omega,
                             const PathOptions& options = {});

OptimalPolicy optimize(double omega, PolicyConstraint constraint, const Model& model,
                       const SearchConfig& config = {});

/// Same as optimize(Full) but starting from a precomputed possibility grid.
OptimalPolicy optimize_from_grid(double omega, const std::vector<BandEvaluation>& grid,
                                 const Model& model, const SearchConfig& config);

struct FrontierPoint {
  AbilityBand band{};
  double S = 0.0;
  double R = 0.0;
  bool pareto = false;
};

struct SupportPoint {
  double omega = 0.0;
  AbilityBand band{};
  double S = 0.0;
  double R = 0.0;
};

struct FrontierResult {
  std::vector<FrontierPoint> possibility;
  std::vector<SupportPoint> frontier;  ///< ordered by increasing S, duplicates merged
  int convexity_violations = 0;
  double worst_convexity_gap = 0.0;
  double no_intervention_S = 0.0;
  double no_intervention_R = 0.0;
  bool no_intervention_interior = false;
};

/// Possibility set on a resolution x resolution grid, Pareto flags, the
/// frontier traced by weighted-welfare maximizers over `omega_samples`
/// evenly spaced weights, and the convexity diagnostic.
FrontierResult frontier(int resolution, const Model& model, const SearchConfig& config,
                        int omega_samples = 21, double convexity_tol = 1e-6);

enum class SweepParameter { a, q, rho, b };

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& name);
ModelParams with_parameter(ModelParams params, SweepParameter p, double value);

struct SweepRow {
  std::string param;
  double value = 0.0;
  double z_lo = 0.0;
  double z_hi = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double W_full = 0.0;
  double W_minonly = 0.0;
  double W_none = 0.0;
  double gain_full_pct = 0.0;
  double gain_minonly_pct = 0.0;
  double minonly_z_lo = 0.0;
  std::string error;  ///< non-empty when this value failed to solve
};

/// For each value: rebuild the parametric model, solve all three policy
/// constraints and record the full-policy band and the welfare levels/gains.
/// Failures are recorded in the row; rows are in input order.
std::vector<SweepRow> sweep(SweepParameter param, const std::vector<double>& values, double omega,
                            const ModelParams& base, const SearchConfig& config);

struct WelfareGain {
  double value = 0.0;
  double gain_full_pct = 0.0;
  double gain_minonly_pct = 0.0;
  std::string error;
};

std::vector<WelfareGain> welfare_improvement(SweepParameter param, const std::vector<double>& values,
                                             double omega, const ModelParams& base,
                                             const SearchConfig& config);

/// CSV with header
/// `param,value,z_lo,z_hi,t_lo,t_hi,W_full,W_minonly,W_none,gain_full_pct,gain_minonly_pct`.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows, double omega);

}  // namespace wageband
