#include "wageband/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "wageband/errors.hpp"
#include "wageband/io.hpp"

namespace wageband {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

template <class F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (Error& e) {
    e.add_context(stage);
    throw;
  }
}

Equilibrium empty_market(const Model& model) {
  Equilibrium eq;
  eq.kind = EquilibriumKind::Pooling;
  const double t = t_hat(model);
  eq.boundary = {model.z_max(), model.kappa(t, model.z_max()), t};
  eq.pooling = PoolingBlock{model.z_max(), eq.boundary.s_lo, t};
  eq.band = {t, t};
  eq.ability_band = {model.z_max(), model.z_max()};
  eq.empty_market = true;
  return eq;
}

Equilibrium pooling_equilibrium(const PoolingSolution& sol) {
  Equilibrium eq;
  eq.kind = EquilibriumKind::Pooling;
  eq.boundary = {sol.z_star, sol.s_star, sol.t_star};
  eq.pooling = PoolingBlock{sol.z_star, sol.s_star, sol.t_star};
  eq.band = {sol.t_star, sol.t_star};
  eq.ability_band = {sol.z_star, sol.z_star};
  return eq;
}

Equilibrium separating_equilibrium(const BottomBoundary& boundary, SeparatingPath path,
                                   const Model& model) {
  Equilibrium eq;
  eq.kind = EquilibriumKind::Separating;
  eq.boundary = boundary;
  eq.path = std::move(path);
  eq.band = {boundary.t_lo, kUnboundedWage};
  eq.ability_band = {boundary.z_lo, model.z_max()};
  return eq;
}

Equilibrium well_behaved(const BottomBoundary& boundary, SeparatingPath path,
                         const PoolingBlock& block) {
  Equilibrium eq;
  eq.kind = EquilibriumKind::WellBehaved;
  eq.boundary = boundary;
  eq.path = std::move(path);
  eq.pooling = block;
  eq.band = {boundary.t_lo, block.t_hi};
  eq.ability_band = {boundary.z_lo, block.z_hi};
  return eq;
}

void check_band(const AbilityBand& band, const Model& model) {
  const double tol = 1e-12 * std::max(1.0, model.z_max());
  if (!(band.z_lo >= model.z_min() - tol && band.z_lo <= band.z_hi + tol &&
        band.z_hi <= model.z_max() + tol))
    throw DomainError("ability band [" + num(band.z_lo) + ", " + num(band.z_hi) +
                      "] must satisfy z_min <= z_lo <= z_hi <= z_max");
}

}  // namespace

std::string to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Separating:
      return "Separating";
    case EquilibriumKind::WellBehaved:
      return "WellBehaved";
    case EquilibriumKind::Pooling:
      return "Pooling";
  }
  return "Separating";
}

Equilibrium solve_from_thresholds(const AbilityBand& band_in, const Model& model,
                                  const PathOptions& options) {
  check_band(band_in, model);
  AbilityBand band{std::clamp(band_in.z_lo, model.z_min(), model.z_max()),
                   std::clamp(band_in.z_hi, model.z_min(), model.z_max())};
  band.z_hi = std::max(band.z_hi, band.z_lo);
  if (band.z_lo >= model.z_max()) return empty_market(model);
  if (band.z_hi - band.z_lo < kClassificationTol)
    return pooling_equilibrium(
        staged("pooling system", [&] { return pooling_from_ability(band.z_lo, model); }));
  const BottomBoundary boundary =
      staged("bottom match", [&] { return bottom_from_ability(band.z_lo, model); });
  const bool separating = band.z_hi >= model.z_max() - kClassificationTol;
  const double target = separating ? model.z_max() : band.z_hi;
  SeparatingPath path =
      staged("separating path", [&] { return integrate_path(boundary, target, model, options); });
  if (separating) return separating_equilibrium(boundary, std::move(path), model);
  const PoolingBlock block =
      staged("top pooling block", [&] { return top_from_ability(path, band.z_hi, model); });
  return well_behaved(boundary, std::move(path), block);
}

Equilibrium solve_from_thresholds(const AbilityBand& band_in, const SeparatingPath& full_path,
                                  const Model& model) {
  check_band(band_in, model);
  AbilityBand band{std::clamp(band_in.z_lo, model.z_min(), model.z_max()),
                   std::clamp(band_in.z_hi, model.z_min(), model.z_max())};
  band.z_hi = std::max(band.z_hi, band.z_lo);
  if (band.z_lo >= model.z_max()) return empty_market(model);
  if (band.z_hi - band.z_lo < kClassificationTol)
    return pooling_equilibrium(
        staged("pooling system", [&] { return pooling_from_ability(band.z_lo, model); }));
  const BottomBoundary& boundary = full_path.boundary();
  if (std::abs(boundary.z_lo - band.z_lo) > 1e-12 * std::max(1.0, model.z_max()))
    throw DomainError("precomputed path starts at " + num(boundary.z_lo) + ", not at z_lo = " +
                      num(band.z_lo));
  if (band.z_hi >= model.z_max() - kClassificationTol)
    return separating_equilibrium(boundary, full_path, model);
  SeparatingPath path = full_path.truncated(band.z_hi);
  const PoolingBlock block =
      staged("top pooling block", [&] { return top_from_ability(path, band.z_hi, model); });
  return well_behaved(boundary, std::move(path), block);
}

Equilibrium solve_from_band(const WageBand& band, const Model& model, const PathOptions& options) {
  if (!(band.t_lo >= model.t_floor()))
    throw DomainError("minimum wage " + num(band.t_lo) + " below the subsistence wage " +
                      num(model.t_floor()));
  if (!(band.t_hi >= band.t_lo))
    throw DomainError("maximum wage " + num(band.t_hi) + " below minimum wage " + num(band.t_lo));
  if (band.t_hi == band.t_lo)
    return pooling_equilibrium(
        staged("pooling system", [&] { return pooling_only(band.t_lo, model); }));
  const BottomBoundary boundary =
      staged("bottom match", [&] { return bottom_from_wage(band.t_lo, model); });
  SeparatingPath full = staged(
      "separating path", [&] { return integrate_path(boundary, model.z_max(), model, options); });
  const double upper = t_hi_star(full, model);
  if (band.t_hi >= upper) return separating_equilibrium(boundary, std::move(full), model);
  const double lowest =
      staged("pooling limit", [&] { return top_from_ability(full, boundary.z_lo, model).t_hi; });
  if (band.t_hi <= lowest)
    // The cap binds below the wage that would pool everyone from z_lo up:
    // the market collapses to a single pooled wage at the cap.
    return pooling_equilibrium(
        staged("pooling system", [&] { return pooling_only(band.t_hi, model); }));
  const PoolingBlock block =
      staged("top pooling block", [&] { return top_from_wage(full, band.t_hi, model); });
  if (block.z_hi >= model.z_max() - kClassificationTol)
    return separating_equilibrium(boundary, std::move(full), model);
  if (block.z_hi - boundary.z_lo < kClassificationTol)
    return pooling_equilibrium(
        staged("pooling system", [&] { return pooling_from_ability(boundary.z_lo, model); }));
  return well_behaved(boundary, full.truncated(block.z_hi), block);
}

Belief off_path_belief(const Equilibrium& eq, double s, const Model& model) {
  if (s < 0.0) throw DomainError("education must be non-negative");
  const double z_max = model.z_max();
  auto point = [](double z) { return Belief{Belief::Kind::Point, z, z, z}; };
  if (eq.empty_market) return point(z_max);
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); };
  if (eq.kind == EquilibriumKind::Pooling) {
    const auto& blk = *eq.pooling;
    if (same(s, blk.s_hi)) return {Belief::Kind::TruncatedPrior, blk.z_hi, blk.z_hi, z_max};
    return point(s < blk.s_hi ? blk.z_hi : z_max);
  }
  const auto& path = eq.path;
  if (s < path.s_min()) return point(model.z_min());
  if (s <= path.s_max()) return point(path.mu_of_s(s));
  if (eq.kind == EquilibriumKind::Separating) return point(z_max);
  const auto& blk = *eq.pooling;
  if (same(s, blk.s_hi)) return {Belief::Kind::TruncatedPrior, blk.z_hi, blk.z_hi, z_max};
  if (s < blk.s_hi) return point(blk.z_hi);
  return point(z_max);
}

RoundtripReport roundtrip_check(const Equilibrium& eq, const Model& model,
                                const PathOptions& options) {
  RoundtripReport r;
  if (eq.empty_market) return r;
  auto diff = [](double a, double b) {
    if (a == b) return 0.0;  // covers matching unbounded sentinels
    return std::abs(a - b);
  };
  auto absorb = [&](const Equilibrium& other) {
    r.dz_lo = std::max(r.dz_lo, diff(eq.ability_band.z_lo, other.ability_band.z_lo));
    r.dz_hi = std::max(r.dz_hi, diff(eq.ability_band.z_hi, other.ability_band.z_hi));
    r.dt_lo = std::max(r.dt_lo, diff(eq.band.t_lo, other.band.t_lo));
    r.dt_hi = std::max(r.dt_hi, diff(eq.band.t_hi, other.band.t_hi));
  };
  try {
    absorb(solve_from_band(eq.band, model, options));
    absorb(solve_from_thresholds(eq.ability_band, model, options));
  } catch (const Error&) {
    r.dz_lo = r.dz_hi = r.dt_lo = r.dt_hi = std::numeric_limits<double>::infinity();
  }
  r.max_discrepancy = std::max({r.dz_lo, r.dz_hi, r.dt_lo, r.dt_hi});
  return r;
}

std::string to_json(const Equilibrium& eq, const Model& model, int samples) {
  using nlohmann::ordered_json;
  auto number = [](double v) -> ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return io::round_significant(v);
  };
  ordered_json j;
  j["kind"] = to_string(eq.kind);
  j["model"] = to_string(model.variant());
  j["empty_market"] = eq.empty_market;
  j["z_lo"] = number(eq.ability_band.z_lo);
  j["z_hi"] = number(eq.ability_band.z_hi);
  j["s_lo"] = number(eq.boundary.s_lo);
  const double s_hi = eq.pooling ? eq.pooling->s_hi : eq.path.s_max();
  j["s_hi"] = number(s_hi);
  j["t_lo"] = number(eq.band.t_lo);
  j["t_hi"] = number(eq.band.t_hi);
  j["t_hi_star"] = eq.kind == EquilibriumKind::Separating ? number(eq.path.tau_max()) : nullptr;
  ordered_json path = ordered_json::array();
  if (!eq.path.empty()) {
    const int n = std::max(samples, 2);
    const double z0 = eq.path.mu_min(), z1 = eq.path.mu_max();
    for (int i = 0; i < n && (i == 0 || z1 > z0); ++i) {
      const double z = (i == n - 1) ? z1 : z0 + (z1 - z0) * i / (n - 1);
      const double s = eq.path.sigma_of_z(z);
      ordered_json row;
      row["s"] = number(s);
      row["tau"] = number(eq.path.tau_of_s(s));
      row["mu"] = number(z);
      path.push_back(row);
    }
  }
  j["path"] = path;
  return j.dump(2) + "\n";
}

}  // namespace wageband
