#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <vector>

#include "wageband/model.hpp"

namespace wageband {

/// Lowest participating worker type, her education and the minimum wage she earns.
struct BottomBoundary {
  double z_lo = 0.0;
  double s_lo = 0.0;
  double t_lo = 0.0;
};

/// One stored sample of the separating curve with its exact ODE slopes.
/// Slopes are NaN on a node that is only joined linearly to its neighbour.
struct PathNode {
  double s = 0.0;
  double tau = 0.0;
  double mu = 0.0;
  double dtau = 0.0;
  double dmu = 0.0;
};

struct PathOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// Largest belief increment between stored nodes, as a fraction of the support width.
  double max_mu_gap_fraction = 1.0 / 2000.0;
  /// Terminal accuracy of the event mu(s) = z_target.
  double event_tol = 1e-9;
  /// Offset from the bottom of the support used when the boundary state is singular.
  double bottom_offset = 1e-4;
  /// Education level beyond which the integration is declared divergent.
  double s_cap = 1e9;
  long max_steps = 4'000'000;
};

/// Slopes (dtau/ds, dmu/ds) of the market wage and posterior belief, using
/// the closed forms specialised to the model variant. Throws IntegrationError
/// when the right-hand side is singular.
std::array<double, 2> ode_rhs(double s, double tau, double mu, const Model& model);

/// Same slopes assembled from the generic partial-derivative expression.
std::array<double, 2> ode_rhs_generic(double s, double tau, double mu, const Model& model);

/// Monotone separating curve s -> (tau(s), mu(s)) with its inverse sigma = mu^{-1}.
/// Immutable once built; all queries are const and thread-safe.
class SeparatingPath {
 public:
  SeparatingPath() = default;
  SeparatingPath(BottomBoundary boundary, std::vector<PathNode> nodes);

  const BottomBoundary& boundary() const { return boundary_; }
  const std::vector<PathNode>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }
  /// True when the separating region is a single point.
  bool degenerate() const { return nodes_.size() < 2; }

  double s_min() const { return nodes_.front().s; }
  double s_max() const { return nodes_.back().s; }
  double mu_min() const { return nodes_.front().mu; }
  double mu_max() const { return nodes_.back().mu; }
  double tau_max() const { return nodes_.back().tau; }

  double tau_of_s(double s) const;
  double mu_of_s(double s) const;
  double dtau_of_s(double s) const;
  double dmu_of_s(double s) const;
  double sigma_of_z(double z) const;
  double wage_of_z(double z) const { return tau_of_s(sigma_of_z(z)); }

  /// Path restricted to beliefs in [mu_min, z], ending on an interpolated node.
  SeparatingPath truncated(double z) const;

  /// CSV with header `s,tau,mu`, one line per stored node.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t segment_by_s(double s) const;
  std::size_t segment_by_mu(double mu) const;
  void require_nonempty() const;

  BottomBoundary boundary_{};
  std::vector<PathNode> nodes_;
};

/// Integrates the separating ODE from `boundary` until mu(s) = z_target.
/// When the boundary state is singular (zero belief or zero education at the
/// bottom of the support) or lies within `bottom_offset` of z_min, integration
/// starts instead from `offset_start` (the entry boundary of ability
/// z_min + bottom_offset), and the true boundary is kept as the first node
/// joined linearly to it.
SeparatingPath integrate_path(const BottomBoundary& boundary, double z_target, const Model& model,
                              const PathOptions& options = {},
                              std::optional<BottomBoundary> offset_start = std::nullopt);

/// Worker first-order residual u_t tau' + u_s at (s, tau, mu, tau').
double worker_foc_residual(const Model& model, double s, double tau, double mu, double dtau);
/// Firm first-order residual g_t tau' + g_z mu' + g_s at (s, tau, mu, tau', mu').
double firm_foc_residual(const Model& model, double s, double tau, double mu, double dtau,
                         double dmu);

}  // namespace wageband
