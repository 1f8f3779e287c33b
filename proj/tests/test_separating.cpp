#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "wageband/errors.hpp"
#include "wageband/model.hpp"
#include "wageband/separating.hpp"
#include "wageband/thresholds.hpp"

using namespace wageband;

namespace {

const Model kBaseline = Model::parametric(ModelParams{});
const Model kExample = Model::quasilinear_example();

Model parametric_with(double a, double q, double rho, double b) {
  ModelParams p;
  p.a = a;
  p.q = q;
  p.rho = rho;
  p.b = b;
  return Model::parametric(p);
}

/// Closed-form belief of the example model from the boundary (z_l, s_l).
double example_mu(double s, double z_l, double s_l) {
  return std::sqrt(s * s / 2.0 - s_l * s_l / 2.0 + z_l * z_l);
}

SeparatingPath full_path(const Model& m, double z_lo) {
  const BottomBoundary b = bottom_from_ability(z_lo, m);
  return integrate_path(b, m.z_max(), m);
}

/// Largest FOC residual between nodes, using the interpolated curves and their
/// derivatives, relative to the size of the terms. Segments with beliefs below
/// 0.1 are skipped: next to the singular zero-ability corner the exact
/// solution behaves like a fractional power of s, which no cubic segment
/// follows closely (the nodal residuals still cover that region).
struct FocCheck {
  double worker = 0.0;
  double firm = 0.0;
};

FocCheck foc_between_nodes(const SeparatingPath& path, const Model& m) {
  FocCheck r;
  const auto& n = path.nodes();
  for (std::size_t i = 1; i + 1 < n.size(); ++i) {
    if (!std::isfinite(n[i].dtau) || !std::isfinite(n[i + 1].dtau)) continue;
    if (n[i].mu < 0.1) continue;
    for (double w : {0.0, 0.5}) {
      const double s = n[i].s + w * (n[i + 1].s - n[i].s);
      const double tau = path.tau_of_s(s), mu = path.mu_of_s(s);
      const double dtau = path.dtau_of_s(s), dmu = path.dmu_of_s(s);
      const Partials d = m.partials(tau, m.match(mu), s, mu);
      const double scale_w = std::max(1.0, std::abs(d.u_s));
      const double scale_f = std::max({1.0, std::abs(d.g_s), std::abs(d.g_t * dtau)});
      r.worker = std::max(r.worker, std::abs(worker_foc_residual(m, s, tau, mu, dtau)) / scale_w);
      r.firm = std::max(r.firm, std::abs(firm_foc_residual(m, s, tau, mu, dtau, dmu)) / scale_f);
    }
  }
  return r;
}

}  // namespace

TEST_CASE("ODE right-hand side at reference points") {
  const auto d = ode_rhs(1.0, 2.0, 1.0, kBaseline);
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d[1] == doctest::Approx(0.25).epsilon(1e-14));
  // example model: mu' = s / (2 mu), tau' = s / mu
  const auto e = ode_rhs(2.0, 3.0, 1.0, kExample);
  CHECK(e[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("property: generic and specialised right-hand sides agree") {
  for (const Model& m : {kBaseline, parametric_with(0.0, 0.5, 1.0, 1.5), parametric_with(1.0, 2.0, 0.25, 1.0),
                         parametric_with(0.3, 0.0, 1.25, 2.0), kExample}) {
    for (double s : {0.2, 1.0, 3.5})
      for (double tau : {1.2, 4.0, 12.0})
        for (double mu : {0.1, 1.0, 2.7}) {
          const auto a = ode_rhs(s, tau, mu, m);
          const auto g = ode_rhs_generic(s, tau, mu, m);
          CHECK(std::abs(a[0] - g[0]) <= 1e-12 * std::max(1.0, std::abs(a[0])));
          CHECK(std::abs(a[1] - g[1]) <= 1e-12 * std::max(1.0, std::abs(a[1])));
        }
  }
}

TEST_CASE("singular right-hand side reports the offending state") {
  CHECK_THROWS_AS(ode_rhs(1.0, 2.0, 0.0, kBaseline), IntegrationError);
  try {
    ode_rhs(1.0, 2.0, -1.0, kBaseline);
  } catch (const IntegrationError& e) {
    CHECK(e.last_state().mu == -1.0);
  }
}

TEST_CASE("example path matches the closed-form belief") {
  const auto start = std::chrono::steady_clock::now();
  const BottomBoundary b{0.5, 1.0, 2.0};
  const SeparatingPath path = integrate_path(b, 3.0, kExample);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(elapsed < 1.0);
  CHECK(std::abs(path.mu_of_s(2.0) - std::sqrt(1.75)) < 1e-9);
  double worst = 0.0;
  for (const auto& n : path.nodes()) {
    worst = std::max(worst, std::abs(n.mu - example_mu(n.s, 0.5, 1.0)) / example_mu(n.s, 0.5, 1.0));
    CHECK(std::abs(n.tau - (2.0 * n.mu + 1.0)) < 1e-8);
  }
  CHECK(worst < 1e-6);
  for (double z = 0.5; z <= 3.0; z += 0.125) {
    const double s = path.sigma_of_z(z);
    CHECK(std::abs(s - std::sqrt(2 * z * z - 2 * 0.25 + 1.0)) < 1e-7);
    CHECK(std::abs(path.mu_of_s(s) - z) < 1e-8);
  }
  CHECK(path.sigma_of_z(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(path.mu_max() - 3.0) < 1e-9);
  CHECK(std::abs(path.s_max() - std::sqrt(18.5)) < 1e-7);
}

TEST_CASE("degenerate path when the target equals the bottom") {
  const BottomBoundary b{0.5, 1.0, 2.0};
  const SeparatingPath path = integrate_path(b, 0.5, kExample);
  CHECK(path.degenerate());
  CHECK(path.nodes().size() == 1);
  CHECK(path.sigma_of_z(0.5) == 1.0);
}

TEST_CASE("queries outside the covered range are range errors") {
  const SeparatingPath path = integrate_path({0.5, 1.0, 2.0}, 2.0, kExample);
  CHECK_THROWS_AS(path.tau_of_s(0.5), RangeError);
  CHECK_THROWS_AS(path.sigma_of_z(2.5), RangeError);
  CHECK_THROWS_AS(SeparatingPath().tau_of_s(1.0), RangeError);
}

TEST_CASE("property: paths are strictly monotone with bounded belief gaps") {
  for (const Model& m : {kBaseline, parametric_with(0.0, 1.0, 0.0, 2.0), parametric_with(1.0, 1.0, 0.0, 2.0),
                         parametric_with(0.5, 2.0, 0.0, 2.0), parametric_with(0.5, 1.0, 1.25, 2.0),
                         parametric_with(0.5, 1.0, 0.0, 1.0), kExample}) {
    for (double z_lo : {0.0, 0.4, 1.5}) {
      const SeparatingPath path = full_path(m, z_lo);
      const auto& n = path.nodes();
      REQUIRE(n.size() > 10);
      const double gap = (m.z_max() - m.z_min()) / 2000.0;
      for (std::size_t i = 1; i < n.size(); ++i) {
        CHECK(n[i].s > n[i - 1].s);
        CHECK(n[i].tau > n[i - 1].tau);
        CHECK(n[i].mu > n[i - 1].mu);
        CHECK(n[i].mu - n[i - 1].mu <= gap * (1.0 + 1e-9));
      }
      CHECK(n.front().mu == doctest::Approx(z_lo));
      CHECK(std::abs(n.back().mu - m.z_max()) < 1e-9);
      CHECK(n.front().s == doctest::Approx(path.boundary().s_lo));
    }
  }
}

TEST_CASE("property: first-order conditions hold along every path") {
  for (const Model& m : {kBaseline, parametric_with(0.0, 1.0, 0.0, 2.0), parametric_with(1.0, 1.0, 0.0, 2.0),
                         parametric_with(0.5, 0.0, 0.0, 2.0), parametric_with(0.5, 2.0, 0.0, 2.0),
                         parametric_with(0.5, 1.0, 0.5, 2.0), parametric_with(0.5, 1.0, 1.25, 2.0),
                         parametric_with(0.5, 1.0, 0.0, 1.0), parametric_with(0.5, 1.0, 0.0, 1.5), kExample}) {
    for (double z_lo : {0.0, 0.6}) {
      const SeparatingPath path = full_path(m, z_lo);
      for (const auto& n : path.nodes()) {
        if (!std::isfinite(n.dtau)) continue;
        CHECK(std::abs(worker_foc_residual(m, n.s, n.tau, n.mu, n.dtau)) < 1e-6);
        CHECK(std::abs(firm_foc_residual(m, n.s, n.tau, n.mu, n.dtau, n.dmu)) < 1e-6);
      }
      const FocCheck mid = foc_between_nodes(path, m);
      CHECK(mid.worker < 1e-6);
      CHECK(mid.firm < 1e-6);
    }
  }
}

TEST_CASE("halving the tolerances moves the terminal state by less than ten tolerances") {
  for (const Model& m : {kBaseline, parametric_with(0.5, 1.0, 1.0, 1.5)}) {
    const BottomBoundary b = bottom_from_ability(0.3, m);
    PathOptions o;
    const SeparatingPath p1 = integrate_path(b, 3.0, m, o);
    o.rel_tol /= 2.0;
    o.abs_tol /= 2.0;
    const SeparatingPath p2 = integrate_path(b, 3.0, m, o);
    const double tol = 10.0 * (1e-8 * std::abs(p1.s_max()) + 1e-10);
    CHECK(std::abs(p1.s_max() - p2.s_max()) < tol);
    CHECK(std::abs(p1.tau_max() - p2.tau_max()) < 10.0 * (1e-8 * std::abs(p1.tau_max()) + 1e-10));
  }
}

TEST_CASE("singular bottom boundary uses the offset start joined to the true boundary") {
  const SeparatingPath path = full_path(kBaseline, 0.0);
  const auto& n = path.nodes();
  CHECK(n[0].s == 0.0);
  CHECK(n[0].mu == 0.0);
  CHECK(n[0].tau == 1.0);
  CHECK(std::isnan(n[0].dtau));
  CHECK(n[1].mu == doctest::Approx(1e-4).epsilon(1e-9));
  // linear join inside the first segment
  const double s_mid = 0.5 * n[1].s;
  CHECK(path.mu_of_s(s_mid) == doctest::Approx(0.5 * n[1].mu));
}

TEST_CASE("truncation keeps the path up to an interior belief") {
  const SeparatingPath path = full_path(kBaseline, 0.2);
  const SeparatingPath cut = path.truncated(1.7);
  CHECK(cut.mu_max() == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(cut.s_max() == doctest::Approx(path.sigma_of_z(1.7)).epsilon(1e-12));
  CHECK(cut.tau_of_s(cut.s_min() + 0.1) == doctest::Approx(path.tau_of_s(path.s_min() + 0.1)));
}

TEST_CASE("path CSV export") {
  const SeparatingPath path = integrate_path({0.5, 1.0, 2.0}, 0.51, kExample);
  std::ostringstream os;
  path.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("s,tau,mu\n1,2,0.5\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == path.nodes().size() + 1);
}
