#include "wageband/welfare.hpp"

#include <algorithm>
#include <cmath>

#include "wageband/io.hpp"
#include "wageband/numerics/quadrature.hpp"

namespace wageband {

WelfareReport reweight(const WelfareReport& report, double omega) {
  WelfareReport out = report;
  out.omega = omega;
  out.W = omega * report.R + (1.0 - omega) * report.S;
  return out;
}

WelfareReport surpluses(const Equilibrium& eq, const Model& model, double omega) {
  WelfareReport report;
  report.omega = omega;
  if (eq.empty_market) return report;
  const double density = 1.0 / (model.z_max() - model.z_min());
  if (eq.kind != EquilibriumKind::Pooling && !eq.path.degenerate()) {
    const auto& nodes = eq.path.nodes();
    std::vector<double> z(nodes.size()), u(nodes.size()), g(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& n = nodes[i];
      z[i] = n.mu;
      u[i] = model.utility(n.tau, n.s, n.mu);
      g[i] = model.profit(n.tau, model.match(n.mu), n.s, n.mu);
    }
    report.S += density * numerics::simpson(z, u);
    report.R += density * numerics::simpson(z, g);
  }
  if (eq.pooling && eq.pooling->z_hi < model.z_max()) {
    const auto& blk = *eq.pooling;
    report.S += model.pooled_utility_integral(blk.t_hi, blk.s_hi, blk.z_hi, model.z_max());
    report.R +=
        model.pooled_profit_integral(blk.t_hi, blk.s_hi, blk.z_hi, blk.z_hi, model.z_max());
  }
  report.W = omega * report.R + (1.0 - omega) * report.S;
  return report;
}

double equilibrium_utility(const Equilibrium& eq, const Model& model, double z) {
  if (eq.empty_market || z < eq.ability_band.z_lo) return 0.0;
  if (eq.pooling && z >= eq.pooling->z_hi)
    return model.utility(eq.pooling->t_hi, eq.pooling->s_hi, z);
  const double s = eq.path.sigma_of_z(std::min(z, eq.path.mu_max()));
  return model.utility(eq.path.tau_of_s(s), s, z);
}

double equilibrium_profit(const Equilibrium& eq, const Model& model, double z) {
  if (eq.empty_market || z < eq.ability_band.z_lo) return 0.0;
  const double x = model.match(z);
  if (eq.pooling && z >= eq.pooling->z_hi)
    return model.expected_profit_above(eq.pooling->t_hi, x, eq.pooling->s_hi, eq.pooling->z_hi);
  const double s = eq.path.sigma_of_z(std::min(z, eq.path.mu_max()));
  return model.profit(eq.path.tau_of_s(s), x, s, z);
}

std::vector<double> Profile::difference() const {
  std::vector<double> d(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) d[i] = policy[i] - reference[i];
  return d;
}

void Profile::write_csv(std::ostream& out) const {
  io::CsvWriter csv(out, {"z", "value_policy", "value_reference"});
  for (std::size_t i = 0; i < z.size(); ++i) {
    csv.cell(z[i]).cell(policy[i]).cell(reference[i]);
    csv.end_row();
  }
}

namespace {

template <class F>
Profile build_profile(F&& value, const Equilibrium& policy, const Equilibrium& reference,
                      const Model& model, int points) {
  points = std::max(points, 2);
  Profile p;
  const double z0 = model.z_min(), z1 = model.z_max();
  for (int i = 0; i < points; ++i) {
    const double z = (i == points - 1) ? z1 : z0 + (z1 - z0) * i / (points - 1);
    p.z.push_back(z);
    p.policy.push_back(value(policy, z));
    p.reference.push_back(value(reference, z));
  }
  auto diff = [&](double z) { return value(policy, z) - value(reference, z); };
  // Sign changes between strictly non-zero samples, ignoring exact-zero runs
  // (e.g. the region where neither side participates).
  int last = -1;
  for (int i = 0; i < points; ++i) {
    const double d = p.policy[i] - p.reference[i];
    if (d == 0.0) continue;
    if (last >= 0) {
      const double dl = p.policy[last] - p.reference[last];
      if ((dl < 0.0) != (d < 0.0)) {
        double lo = p.z[last], hi = p.z[i];
        const bool lo_negative = dl < 0.0;
        while (hi - lo > 1e-9) {
          const double mid = 0.5 * (lo + hi);
          ((diff(mid) < 0.0) == lo_negative ? lo : hi) = mid;
        }
        p.crossings.push_back(0.5 * (lo + hi));
      }
    }
    last = i;
  }
  return p;
}

}  // namespace

Profile worker_utility_profile(const Equilibrium& policy, const Equilibrium& reference,
                               const Model& model, int points) {
  return build_profile(
      [&](const Equilibrium& eq, double z) { return equilibrium_utility(eq, model, z); }, policy,
      reference, model, points);
}

Profile firm_profit_profile(const Equilibrium& policy, const Equilibrium& reference,
                            const Model& model, int points) {
  return build_profile(
      [&](const Equilibrium& eq, double z) { return equilibrium_profit(eq, model, z); }, policy,
      reference, model, points);
}

double Cdf::operator()(double x) const {
  if (point.empty() || x < point.front()) return 0.0;
  if (x >= point.back()) return cdf.back();
  // Last index with point <= x (right-continuity takes the top of an atom).
  const auto it = std::upper_bound(point.begin(), point.end(), x);
  const std::size_t j = static_cast<std::size_t>(std::distance(point.begin(), it));
  const std::size_t i = j - 1;
  if (point[j] == point[i]) return cdf[i];
  const double w = (x - point[i]) / (point[j] - point[i]);
  return cdf[i] + w * (cdf[j] - cdf[i]);
}

void Cdf::write_csv(std::ostream& out) const {
  io::CsvWriter csv(out, {"point", "cdf"});
  for (std::size_t i = 0; i < point.size(); ++i) {
    csv.cell(point[i]).cell(cdf[i]);
    csv.end_row();
  }
}

OutcomeDistributions outcome_distributions(const Equilibrium& eq, const Model& model) {
  OutcomeDistributions d;
  auto push = [](Cdf& c, double x, double f) {
    c.point.push_back(x);
    c.cdf.push_back(f);
  };
  const double out_mass = eq.empty_market ? 1.0 : model.cdf(eq.ability_band.z_lo);
  push(d.education, 0.0, 0.0);
  push(d.wage, 0.0, 0.0);
  if (out_mass > 0.0) {
    push(d.education, 0.0, out_mass);
    push(d.wage, 0.0, out_mass);
  }
  if (eq.empty_market) return d;
  if (eq.kind != EquilibriumKind::Pooling) {
    for (const auto& n : eq.path.nodes()) {
      push(d.education, n.s, model.cdf(n.mu));
      push(d.wage, n.tau, model.cdf(n.mu));
    }
  }
  if (eq.pooling && eq.pooling->z_hi < model.z_max()) {
    const double below = model.cdf(eq.pooling->z_hi);
    push(d.education, eq.pooling->s_hi, below);
    push(d.education, eq.pooling->s_hi, 1.0);
    push(d.wage, eq.pooling->t_hi, below);
    push(d.wage, eq.pooling->t_hi, 1.0);
  }
  return d;
}

}  // namespace wageband
