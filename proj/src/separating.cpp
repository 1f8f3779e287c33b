#include "wageband/separating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wageband/errors.hpp"
#include "wageband/io.hpp"
#include "wageband/numerics/dopri.hpp"
#include "wageband/numerics/hermite.hpp"
#include "wageband/numerics/roots.hpp"
#include "wageband/thresholds.hpp"

namespace wageband {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string state_text(double s, double tau, double mu) {
  std::ostringstream os;
  os.precision(12);
  os << "(s=" << s << ", tau=" << tau << ", mu=" << mu << ")";
  return os.str();
}

void require_regular(double s, double tau, double mu) {
  if (!(mu > 0.0) || !(s > 0.0) || !(tau > 0.0) || !std::isfinite(s) || !std::isfinite(tau) ||
      !std::isfinite(mu))
    throw IntegrationError("singular right-hand side at " + state_text(s, tau, mu), {s, tau, mu});
}

}  // namespace

std::array<double, 2> ode_rhs(double s, double tau, double mu, const Model& model) {
  require_regular(s, tau, mu);
  if (model.is_example()) return {s / mu, s / (2.0 * mu)};
  const auto& p = model.params();
  const double tau_rho = p.rho == 0.0 ? 1.0 : std::pow(tau, p.rho);
  const double marginal_cost = p.beta * p.b * std::pow(s, p.b - 1.0) * tau_rho;
  const double sa = p.a == 0.0 ? 1.0 : std::pow(s, p.a);
  const double mu_q1 = std::pow(mu, p.q + 1.0);
  const double education_return =
      p.a == 0.0 ? 0.0 : p.a * p.k * p.A * std::pow(s, p.a - 1.0) * mu_q1 * mu;
  const double denom = p.k * p.A * (sa + 1.0) * mu_q1;
  return {marginal_cost / mu, (marginal_cost - education_return) / denom};
}

std::array<double, 2> ode_rhs_generic(double s, double tau, double mu, const Model& model) {
  require_regular(s, tau, mu);
  const Partials d = model.partials(tau, model.match(mu), s, mu);
  if (!(d.u_t > 0.0) || !(d.g_z > 0.0))
    throw IntegrationError("degenerate partial derivatives at " + state_text(s, tau, mu),
                           {s, tau, mu});
  return {-d.u_s / d.u_t, (d.g_t * d.u_s - d.g_s * d.u_t) / (d.u_t * d.g_z)};
}

double worker_foc_residual(const Model& model, double s, double tau, double mu, double dtau) {
  const Partials d = model.partials(tau, model.match(mu), s, mu);
  return d.u_t * dtau + d.u_s;
}

double firm_foc_residual(const Model& model, double s, double tau, double mu, double dtau,
                         double dmu) {
  const Partials d = model.partials(tau, model.match(mu), s, mu);
  return d.g_t * dtau + d.g_z * dmu + d.g_s;
}

SeparatingPath::SeparatingPath(BottomBoundary boundary, std::vector<PathNode> nodes)
    : boundary_(boundary), nodes_(std::move(nodes)) {}

void SeparatingPath::require_nonempty() const {
  if (nodes_.empty()) throw RangeError("query on an empty separating path");
}

std::size_t SeparatingPath::segment_by_s(double s) const {
  require_nonempty();
  const double tol = 1e-12 * std::max(1.0, std::abs(s_max()));
  if (s < s_min() - tol || s > s_max() + tol || std::isnan(s)) {
    std::ostringstream os;
    os.precision(12);
    os << "education " << s << " outside the path range [" << s_min() << ", " << s_max() << "]";
    throw RangeError(os.str());
  }
  if (nodes_.size() == 1) return 0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s,
                                   [](double v, const PathNode& n) { return v < n.s; });
  const auto idx = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, nodes_.size() - 2);
}

std::size_t SeparatingPath::segment_by_mu(double mu) const {
  require_nonempty();
  const double tol = 1e-12 * std::max(1.0, std::abs(mu_max()));
  if (mu < mu_min() - tol || mu > mu_max() + tol || std::isnan(mu)) {
    std::ostringstream os;
    os.precision(12);
    os << "ability " << mu << " outside the path range [" << mu_min() << ", " << mu_max() << "]";
    throw RangeError(os.str());
  }
  if (nodes_.size() == 1) return 0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), mu,
                                   [](double v, const PathNode& n) { return v < n.mu; });
  const auto idx = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, nodes_.size() - 2);
}

namespace {

numerics::SegmentSlopes tau_slopes(const PathNode& l, const PathNode& r) {
  return numerics::monotone_slopes(l.s, r.s, l.tau, r.tau, l.dtau, r.dtau);
}

numerics::SegmentSlopes mu_slopes(const PathNode& l, const PathNode& r) {
  return numerics::monotone_slopes(l.s, r.s, l.mu, r.mu, l.dmu, r.dmu);
}

}  // namespace

double SeparatingPath::tau_of_s(double s) const {
  const std::size_t i = segment_by_s(s);
  if (nodes_.size() == 1) return nodes_[0].tau;
  const auto& l = nodes_[i];
  const auto& r = nodes_[i + 1];
  s = std::clamp(s, l.s, r.s);
  return numerics::hermite_value(l.s, r.s, l.tau, r.tau, tau_slopes(l, r), s);
}

double SeparatingPath::mu_of_s(double s) const {
  const std::size_t i = segment_by_s(s);
  if (nodes_.size() == 1) return nodes_[0].mu;
  const auto& l = nodes_[i];
  const auto& r = nodes_[i + 1];
  s = std::clamp(s, l.s, r.s);
  return numerics::hermite_value(l.s, r.s, l.mu, r.mu, mu_slopes(l, r), s);
}

double SeparatingPath::dtau_of_s(double s) const {
  const std::size_t i = segment_by_s(s);
  if (nodes_.size() == 1) return nodes_[0].dtau;
  const auto& l = nodes_[i];
  const auto& r = nodes_[i + 1];
  s = std::clamp(s, l.s, r.s);
  return numerics::hermite_derivative(l.s, r.s, l.tau, r.tau, tau_slopes(l, r), s);
}

double SeparatingPath::dmu_of_s(double s) const {
  const std::size_t i = segment_by_s(s);
  if (nodes_.size() == 1) return nodes_[0].dmu;
  const auto& l = nodes_[i];
  const auto& r = nodes_[i + 1];
  s = std::clamp(s, l.s, r.s);
  return numerics::hermite_derivative(l.s, r.s, l.mu, r.mu, mu_slopes(l, r), s);
}

double SeparatingPath::sigma_of_z(double z) const {
  const std::size_t i = segment_by_mu(z);
  if (nodes_.size() == 1) return nodes_[0].s;
  const auto& l = nodes_[i];
  const auto& r = nodes_[i + 1];
  if (z <= l.mu) return l.s;
  if (z >= r.mu) return r.s;
  const auto slopes = mu_slopes(l, r);
  auto residual = [&](double s) {
    return numerics::hermite_value(l.s, r.s, l.mu, r.mu, slopes, s) - z;
  };
  numerics::RootOptions opt;
  opt.abs_tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, r.s);
  return numerics::brent_root(residual, l.s, r.s, opt).x;
}

SeparatingPath SeparatingPath::truncated(double z) const {
  require_nonempty();
  if (z >= mu_max()) return *this;
  const std::size_t i = segment_by_mu(z);
  std::vector<PathNode> kept(nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  if (z > kept.back().mu) {
    const double s = sigma_of_z(z);
    kept.push_back({s, tau_of_s(s), z, dtau_of_s(s), dmu_of_s(s)});
  }
  return SeparatingPath(boundary_, std::move(kept));
}

void SeparatingPath::write_csv(std::ostream& out) const {
  io::CsvWriter csv(out, {"s", "tau", "mu"});
  for (const auto& n : nodes_) {
    csv.cell(n.s).cell(n.tau).cell(n.mu);
    csv.end_row();
  }
}

namespace {

PathNode node_at(double s, double tau, double mu, const Model& model) {
  const auto d = ode_rhs(s, tau, mu, model);
  return {s, tau, mu, d[0], d[1]};
}

}  // namespace

SeparatingPath integrate_path(const BottomBoundary& boundary, double z_target, const Model& model,
                              const PathOptions& options,
                              std::optional<BottomBoundary> offset_start) {
  const double z_min = model.z_min();
  const double z_max = model.z_max();
  const double width = z_max - z_min;
  const double range_tol = 1e-12 * std::max(1.0, z_max);
  if (z_target < boundary.z_lo - range_tol || z_target > z_max + range_tol) {
    std::ostringstream os;
    os.precision(12);
    os << "target ability " << z_target << " outside [" << boundary.z_lo << ", " << z_max << "]";
    throw RangeError(os.str());
  }
  z_target = std::clamp(z_target, boundary.z_lo, z_max);

  std::vector<PathNode> nodes;
  const PathNode first{boundary.s_lo, boundary.t_lo, boundary.z_lo, kNaN, kNaN};
  if (z_target <= boundary.z_lo) {
    nodes.push_back(first);
    return SeparatingPath(boundary, std::move(nodes));
  }

  BottomBoundary start = boundary;
  const bool singular = !(boundary.z_lo > 0.0) || !(boundary.s_lo > 0.0) ||
                        boundary.z_lo - z_min < options.bottom_offset;
  if (singular) {
    const double z_start = z_min + options.bottom_offset;
    if (z_target <= z_start) {
      // The whole separating region lies inside the offset layer: join linearly.
      const BottomBoundary end = bottom_from_ability(z_target, model);
      nodes.push_back(first);
      nodes.push_back({end.s_lo, end.t_lo, z_target, kNaN, kNaN});
      return SeparatingPath(boundary, std::move(nodes));
    }
    start = offset_start ? *offset_start : bottom_from_ability(z_start, model);
    nodes.push_back(first);
  }

  using Stepper = numerics::DormandPrinceStep<2>;
  using State = Stepper::State;
  auto rhs = [&](double s, const State& y, State& dy) {
    try {
      const auto d = ode_rhs(s, y[0], y[1], model);
      dy = {d[0], d[1]};
    } catch (const IntegrationError&) {
      dy = {kNaN, kNaN};
    }
  };

  double s = start.s_lo;
  State y{start.t_lo, start.z_lo};
  PathNode head;
  try {
    head = node_at(s, y[0], y[1], model);
  } catch (IntegrationError& e) {
    e.add_context("separating path start");
    throw;
  }
  if (!(head.dmu > 0.0) || !(head.dtau > 0.0))
    throw IntegrationError("belief or wage not increasing at the start " +
                               state_text(s, y[0], y[1]),
                           {s, y[0], y[1]});
  nodes.push_back(head);
  State dy{head.dtau, head.dmu};

  const double gap = options.max_mu_gap_fraction * width;
  double h = std::min(0.5 * gap / dy[1], 0.1 * std::max(s, 1e-6));
  Stepper step;
  for (long iter = 0;; ++iter) {
    if (iter >= options.max_steps)
      throw ToleranceError("step budget exhausted before reaching ability target at " +
                               state_text(s, y[0], y[1]),
                           {s, y[0], y[1]});
    if (s > options.s_cap)
      throw IntegrationError("education diverged before reaching ability target at " +
                                 state_text(s, y[0], y[1]),
                             {s, y[0], y[1]});
    if (!(h > 1e-15 * std::max(1.0, s)))
      throw ToleranceError("step size underflow at " + state_text(s, y[0], y[1]), {s, y[0], y[1]});

    step.take(rhs, s, y, dy, h);
    const bool finite = std::isfinite(step.y1[0]) && std::isfinite(step.y1[1]) &&
                        std::isfinite(step.err[0]) && std::isfinite(step.err[1]) &&
                        std::isfinite(step.k[6][0]) && std::isfinite(step.k[6][1]);
    if (!finite) {
      h *= 0.25;
      continue;
    }
    const double en = step.error_norm(options.rel_tol, options.abs_tol);
    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      continue;
    }
    const double dmu_step = step.y1[1] - y[1];
    if (!(dmu_step > 0.0) || !(step.y1[0] > y[0]))
      throw IntegrationError("belief or wage stopped increasing near " +
                                 state_text(s, y[0], y[1]),
                             {s, y[0], y[1]});
    const double covered = std::min(step.y1[1], z_target) - y[1];
    if (covered > gap * (1.0 + 1e-9)) {
      h *= 0.9 * gap / dmu_step;
      continue;
    }
    if (step.y1[1] >= z_target) {
      // Locate mu = z_target on the dense output, then polish with true steps.
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (step.dense(mid)[1] < z_target ? lo : hi) = mid;
      }
      double h_event = std::max(hi * h, 1e-300);
      Stepper polish;
      double residual = 0.0;
      for (int i = 0; i < 40; ++i) {
        polish.take(rhs, s, y, dy, h_event);
        residual = polish.y1[1] - z_target;
        const double slope = polish.k[6][1];
        if (std::abs(residual) <= 1e-3 * options.event_tol || !(slope > 0.0)) break;
        h_event = std::clamp(h_event - residual / slope, 1e-3 * h_event, 2.0 * h);
      }
      if (!(std::abs(residual) < options.event_tol))
        throw ToleranceError("terminal event not resolved near " + state_text(s, y[0], y[1]),
                             {s, y[0], y[1]});
      try {
        nodes.push_back(node_at(s + h_event, polish.y1[0], z_target, model));
      } catch (IntegrationError& e) {
        e.add_context("separating path end");
        throw;
      }
      break;
    }
    s += h;
    y = step.y1;
    dy = step.k[6];
    nodes.push_back({s, y[0], y[1], dy[0], dy[1]});
    h *= (en == 0.0) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
  }
  return SeparatingPath(boundary, std::move(nodes));
}

}  // namespace wageband
