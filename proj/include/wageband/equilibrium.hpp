#pragma once

#include <limits>
#include <optional>
#include <string>

#include "wageband/model.hpp"
#include "wageband/separating.hpp"
#include "wageband/thresholds.hpp"

namespace wageband {

/// Single tolerance (ability units) deciding separating / pooling classification.
inline constexpr double kClassificationTol = 1e-6;
/// Sentinel for an absent maximum wage.
inline constexpr double kUnboundedWage = std::numeric_limits<double>::infinity();

enum class EquilibriumKind { Separating, WellBehaved, Pooling };

std::string to_string(EquilibriumKind kind);

struct AbilityBand {
  double z_lo = 0.0;
  double z_hi = 0.0;
};

struct WageBand {
  double t_lo = 0.0;
  double t_hi = kUnboundedWage;
  bool unbounded() const { return t_hi == kUnboundedWage; }
};

/// A classified monotone equilibrium. Workers below ability_band.z_lo stay
/// out; [z_lo, z_hi) separate along `path`; [z_hi, z_max] pool in `pooling`.
/// For Pooling the path is empty and boundary coincides with the pooled
/// entry point (z*, s*, t*).
struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::Separating;
  BottomBoundary boundary{};
  SeparatingPath path;
  std::optional<PoolingBlock> pooling;
  WageBand band{};
  AbilityBand ability_band{};
  /// Nobody enters (z_lo = z_max); all surpluses are zero.
  bool empty_market = false;
};

Equilibrium solve_from_thresholds(const AbilityBand& band, const Model& model,
                                  const PathOptions& options = {});
/// Same, reusing `full_path`, which must start at the entry boundary of
/// band.z_lo and reach z_max.
Equilibrium solve_from_thresholds(const AbilityBand& band, const SeparatingPath& full_path,
                                  const Model& model);
Equilibrium solve_from_band(const WageBand& band, const Model& model,
                            const PathOptions& options = {});

/// Belief over ability after observing education s.
struct Belief {
  enum class Kind { Point, TruncatedPrior };
  Kind kind = Kind::Point;
  double z = 0.0;   ///< point belief
  double lo = 0.0;  ///< support of the truncated prior
  double hi = 0.0;
};

Belief off_path_belief(const Equilibrium& eq, double s, const Model& model);

struct RoundtripReport {
  double dz_lo = 0.0;
  double dz_hi = 0.0;
  double dt_lo = 0.0;
  double dt_hi = 0.0;
  double max_discrepancy = 0.0;
};

/// Re-solves from the induced wage band and from the induced ability band and
/// reports the largest disagreement with `eq`. Solver failures are reported as
/// an infinite discrepancy.
RoundtripReport roundtrip_check(const Equilibrium& eq, const Model& model,
                                const PathOptions& options = {});

/// JSON document with kind, z_lo, z_hi, s_lo, s_hi, t_lo, t_hi (null when
/// unbounded), t_hi_star and a `path` array of `samples` points.
std::string to_json(const Equilibrium& eq, const Model& model, int samples = 101);

}  // namespace wageband
