#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "wageband/equilibrium.hpp"
#include "wageband/model.hpp"
#include "wageband/optimizer.hpp"
#include "wageband/welfare.hpp"

using namespace wageband;

namespace {

const Model kBaseline = Model::parametric(ModelParams{});
const Model kExample = Model::quasilinear_example();

/// Example-model welfare at omega = 1/2 from the closed forms, integrated by
/// an independent trapezoid rule. Separating surplus per worker is
/// 2z - sigma(z)^2 / (2z) with sigma^2 = 2z^2 + 2 z_l^2; the pooled region
/// earns E[2z' | z' >= z_h] - s_h^2 / (2z) with s_h^2 = 6 z_h + 2 z_l^2.
double example_objective(double z_l, double z_h) {
  const int n = 400000;
  auto trap = [&](auto f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / n;
    double acc = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) acc += f(lo + i * h);
    return acc * h;
  };
  const double sep = trap(
      [&](double z) { return z == 0.0 ? 0.0 : 2 * z - (2 * z * z + 2 * z_l * z_l) / (2 * z); }, z_l,
      z_h);
  const double s2 = 6 * z_h + 2 * z_l * z_l;
  // the pooled cost term integrates in closed form: int dz / z = log
  const double pool = (z_h + 3.0) * (3.0 - z_h) - (z_h > 0.0 ? 0.5 * s2 * std::log(3.0 / z_h) : 0.0);
  return 0.5 * (sep + pool) / 3.0;
}

}  // namespace

TEST_CASE("empty market has zero surplus") {
  const Equilibrium eq = solve_from_thresholds({3.0, 3.0}, kBaseline);
  const WelfareReport r = surpluses(eq, kBaseline, 0.3);
  CHECK(r.R == 0.0);
  CHECK(r.S == 0.0);
  CHECK(r.W == 0.0);
}

TEST_CASE("example welfare equals the closed-form objective") {
  for (auto [z_l, z_h] : std::vector<std::pair<double, double>>{
           {0.5, 1.0}, {0.0, 0.0}, {0.0, 3.0}, {0.2, 2.5}, {1.0, 1.0}, {0.3, 0.8}, {1.5, 3.0}}) {
    const Equilibrium eq = solve_from_thresholds({z_l, z_h}, kExample);
    const WelfareReport r = surpluses(eq, kExample, 0.5);
    CHECK_MESSAGE(std::abs(r.W - example_objective(z_l, z_h)) < 1e-6, z_l << "," << z_h);
  }
  CHECK(surpluses(solve_from_thresholds({0.0, 0.0}, kExample), kExample, 0.5).W ==
        doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("baseline worker surplus against an independent quadrature") {
  const Equilibrium eq = solve_from_thresholds({0.4, 1.8}, kBaseline);
  const auto& blk = *eq.pooling;
  const int n = 200000;
  double sep = 0.0;
  const double lo = 0.4, hi = 1.8, h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double z = lo + i * h;
    const double s = eq.path.sigma_of_z(z);
    const double u = eq.path.tau_of_s(s) - 1.0 - 0.5 * s * s / z;
    sep += (i == 0 || i == n ? 0.5 : 1.0) * u;
  }
  sep *= h / 3.0;
  // pooled: (t_h - 1)(3 - z_h)/3 - beta s_h^2 log(3 / z_h) / 3
  const double pool =
      ((blk.t_hi - 1.0) * (3.0 - blk.z_hi) - 0.5 * blk.s_hi * blk.s_hi * std::log(3.0 / blk.z_hi)) / 3.0;
  const WelfareReport r = surpluses(eq, kBaseline, 0.0);
  CHECK(std::abs(r.S - (sep + pool)) < 1e-6);
}

TEST_CASE("welfare is linear in omega") {
  const Equilibrium eq = solve_from_thresholds({0.4, 1.8}, kBaseline);
  const WelfareReport r = surpluses(eq, kBaseline, 0.3);
  CHECK(r.W == 0.3 * r.R + 0.7 * r.S);
  for (double w : {0.0, 0.25, 1.0}) {
    const WelfareReport x = reweight(r, w);
    CHECK(x.W == w * r.R + (1 - w) * r.S);
    CHECK(x.R == r.R);
    const WelfareReport direct = surpluses(eq, kBaseline, w);
    CHECK(std::abs(direct.W - x.W) < 1e-14);
  }
}

TEST_CASE("property: doubling the node density leaves surpluses unchanged") {
  for (AbilityBand band : {AbilityBand{0.0, 3.0}, AbilityBand{0.4, 1.6}, AbilityBand{1.0, 2.9}}) {
    PathOptions coarse;
    PathOptions fine = coarse;
    fine.max_mu_gap_fraction /= 2.0;
    const WelfareReport a = surpluses(solve_from_thresholds(band, kBaseline, coarse), kBaseline, 0.5);
    const WelfareReport b = surpluses(solve_from_thresholds(band, kBaseline, fine), kBaseline, 0.5);
    CHECK(std::abs(a.R - b.R) < 1e-6 * std::abs(b.R));
    CHECK(std::abs(a.S - b.S) < 1e-6 * std::abs(b.S));
  }
}

TEST_CASE("halving the bottom offset moves welfare by less than 1e-4 relative") {
  for (AbilityBand band : {AbilityBand{0.0, 3.0}, AbilityBand{0.0, 1.5}}) {
    PathOptions o;
    const WelfareReport a = surpluses(solve_from_thresholds(band, kBaseline, o), kBaseline, 0.3);
    o.bottom_offset /= 2.0;
    const WelfareReport b = surpluses(solve_from_thresholds(band, kBaseline, o), kBaseline, 0.3);
    CHECK(std::abs(a.W - b.W) < 1e-4 * std::abs(b.W));
  }
}

TEST_CASE("entry indifference at the bottom and non-negative utility") {
  const Equilibrium eq = solve_from_thresholds({0.6, 2.0}, kBaseline);
  const auto& b = eq.boundary;
  CHECK(std::abs(kBaseline.utility(b.t_lo, b.s_lo, b.z_lo)) < 1e-8);
  CHECK(std::abs(kBaseline.profit(b.t_lo, kBaseline.match(b.z_lo), b.s_lo, b.z_lo)) < 1e-8);
  for (double z = 0.6; z <= 3.0; z += 0.01) CHECK(equilibrium_utility(eq, kBaseline, z) >= -1e-9);
}

TEST_CASE("profiles: non-participants, continuity at the jump and CSV layout") {
  const Equilibrium policy = solve_from_thresholds({0.6, 2.0}, kBaseline);
  const Equilibrium ref = solve_from_thresholds({0.0, 3.0}, kBaseline);
  CHECK(equilibrium_utility(policy, kBaseline, 0.3) == 0.0);
  CHECK(equilibrium_profit(policy, kBaseline, 0.3) == 0.0);
  const double zh = policy.ability_band.z_hi;
  CHECK(std::abs(equilibrium_utility(policy, kBaseline, zh - 1e-9) -
                 equilibrium_utility(policy, kBaseline, zh + 1e-9)) < 1e-6);
  CHECK(std::abs(equilibrium_profit(policy, kBaseline, zh - 1e-9) -
                 equilibrium_profit(policy, kBaseline, zh + 1e-9)) < 1e-6);
  const Profile up = worker_utility_profile(policy, ref, kBaseline, 600);
  CHECK(up.z.size() == 600);
  CHECK(up.z.front() == 0.0);
  CHECK(up.z.back() == 3.0);
  for (std::size_t i = 1; i < up.z.size(); ++i) CHECK(up.z[i] > up.z[i - 1]);
  const auto d = up.difference();
  for (double c : up.crossings) {
    const auto it = std::lower_bound(up.z.begin(), up.z.end(), c);
    REQUIRE(it != up.z.begin());
    REQUIRE(it != up.z.end());
    const std::size_t i = it - up.z.begin();
    CHECK(d[i - 1] * d[i] <= 0.0);
  }
  std::ostringstream os;
  up.write_csv(os);
  CHECK(os.str().rfind("z,value_policy,value_reference\n", 0) == 0);
}

TEST_CASE("ripple effect of the optimal band against no intervention") {
  const OptimalPolicy best = optimize(0.3, PolicyConstraint::Full, kBaseline);
  const Equilibrium policy = solve_from_thresholds(best.ability_band, kBaseline);
  const Equilibrium ref = solve_from_thresholds({0.0, 3.0}, kBaseline);
  const double zl = policy.ability_band.z_lo, zh = policy.ability_band.z_hi;
  const Profile up = worker_utility_profile(policy, ref, kBaseline);
  const auto inside = [&](double z) { return z > zl && z < 3.0; };
  std::vector<double> c;
  for (double z : up.crossings) if (inside(z)) c.push_back(z);
  REQUIRE(c.size() == 2);
  CHECK(c[0] < zh);
  CHECK(zh < c[1]);
  auto du = [&](double z) {
    return equilibrium_utility(policy, kBaseline, z) - equilibrium_utility(ref, kBaseline, z);
  };
  CHECK(du(0.5 * (zl + c[0])) < 0.0);
  CHECK(du(0.5 * (c[0] + c[1])) > 0.0);
  CHECK(du(0.5 * (c[1] + 3.0)) < 0.0);

  const Profile fp = firm_profit_profile(policy, ref, kBaseline);
  std::vector<double> cf;
  for (double z : fp.crossings) if (inside(z)) cf.push_back(z);
  REQUIRE(cf.size() == 2);
  auto dg = [&](double z) {
    return equilibrium_profit(policy, kBaseline, z) - equilibrium_profit(ref, kBaseline, z);
  };
  CHECK(dg(0.5 * (zl + cf[0])) < 0.0);
  CHECK(dg(0.5 * (cf[0] + cf[1])) > 0.0);
  CHECK(dg(0.5 * (cf[1] + 3.0)) < 0.0);
}

TEST_CASE("outcome distributions: normalisation, atoms and Monte Carlo agreement") {
  const Equilibrium eq = solve_from_thresholds({0.6, 2.0}, kBaseline);
  const OutcomeDistributions d = outcome_distributions(eq, kBaseline);
  const double s_hi = eq.pooling->s_hi, t_hi = eq.pooling->t_hi;
  CHECK(d.education(1e9) == doctest::Approx(1.0));
  CHECK(d.wage(1e9) == doctest::Approx(1.0));
  CHECK(d.education(0.0) == doctest::Approx(0.2));  // non-participants below z_lo
  const double atom = d.education(s_hi) - d.education(s_hi - 1e-9);
  CHECK(atom == doctest::Approx((3.0 - 2.0) / 3.0).epsilon(1e-6));
  const double watom = d.wage(t_hi) - d.wage(t_hi - 1e-9);
  CHECK(watom == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  for (std::size_t i = 1; i < d.education.cdf.size(); ++i) {
    CHECK(d.education.cdf[i] >= d.education.cdf[i - 1]);
    CHECK(d.education.point[i] >= d.education.point[i - 1]);
  }

  // push a large ability sample through the equilibrium education choice
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uz(0.0, 3.0);
  std::vector<double> sample;
  for (int i = 0; i < 100000; ++i) {
    const double z = uz(rng);
    sample.push_back(z < 0.6 ? 0.0 : z < 2.0 ? eq.path.sigma_of_z(z) : s_hi);
  }
  std::sort(sample.begin(), sample.end());
  double ks = 0.0;
  for (double x : {0.5, 0.8, 1.0, 1.2, 1.5, 1.8, 2.0}) {
    const double emp =
        double(std::upper_bound(sample.begin(), sample.end(), x) - sample.begin()) / sample.size();
    ks = std::max(ks, std::abs(emp - d.education(x)));
  }
  CHECK(ks < 0.01);
  std::ostringstream os;
  d.wage.write_csv(os);
  CHECK(os.str().rfind("point,cdf\n", 0) == 0);
}
