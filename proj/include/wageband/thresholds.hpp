#pragma once

#include "wageband/model.hpp"
#include "wageband/separating.hpp"

namespace wageband {

/// Education/wage pair maximizing the match profit of ability z subject to
/// the worker's participation constraint.
struct BilateralPair {
  double z = 0.0;
  double s = 0.0;
  double t = 0.0;
  double value = 0.0;  ///< f(t, z) at the maximizer
  bool corner = false;  ///< maximizer sits at the wage floor
};

/// Top pooling block: workers of ability >= z_hi all choose s_hi and earn t_hi.
struct PoolingBlock {
  double z_hi = 0.0;
  double s_hi = 0.0;
  double t_hi = 0.0;
};

/// Pure pooling outcome under a single admissible wage.
struct PoolingSolution {
  double z_star = 0.0;
  double s_star = 0.0;
  double t_star = 0.0;
  bool corner = false;  ///< everyone enters; the bottom worker is not indifferent
};

struct ResidualPair {
  double worker = 0.0;
  double firm = 0.0;
};

/// f(t, z) = g(t, n(z), kappa(t, z), z).
double match_value(double t, double z, const Model& model);
/// Derivative of f in t (the bilateral first-order condition).
double match_value_slope(double t, double z, const Model& model);

BilateralPair bilateral_efficient(double z, const Model& model);

/// Wage above which no positive measure of workers and firms enters.
double t_hat(const Model& model);

BottomBoundary bottom_from_ability(double z_lo, const Model& model);
BottomBoundary bottom_from_wage(double t_lo, const Model& model);
ResidualPair bottom_residuals(const BottomBoundary& b, const Model& model);

/// Jump block at z_hi attached to `path` (which must cover z_hi). At
/// z_hi = z_lo this is the pure pooling outcome with entry threshold z_lo.
PoolingBlock top_from_ability(const SeparatingPath& path, double z_hi, const Model& model);
/// Inverse of top_from_ability in the block wage; `path` must reach z_max.
PoolingBlock top_from_wage(const SeparatingPath& path, double t_hi, const Model& model);
/// Lowest maximum wage that leaves the separating path intact.
double t_hi_star(const SeparatingPath& path, const Model& model);
ResidualPair pooling_block_residuals(const SeparatingPath& path, const PoolingBlock& block,
                                     const Model& model);

/// Pooling outcome in which every participant earns t_single.
PoolingSolution pooling_only(double t_single, const Model& model);
/// Pooling outcome whose entry threshold is z (the pooled wage solves the
/// expected-profit condition above the maximizer).
PoolingSolution pooling_from_ability(double z, const Model& model);
/// Supremum of admissible single wages (pooling threshold reaches z_max).
double pooling_wage_limit(const Model& model);
ResidualPair pooling_residuals(const PoolingSolution& sol, const Model& model);

}  // namespace wageband
