#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle_values.hpp"
#include "slablens/dispersion.hpp"
#include "slablens/energy.hpp"
#include "slablens/field.hpp"

using namespace slab;

namespace {

double gs() { return gamma_star().gamma_star; }

}  // namespace

TEST_CASE("L against brute-force x integration") {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-2);
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  const double p2 = find_roots(P.gamma()).p2;
  const struct {
    double p, xi, want;
  } cases[] = {{0.3, 0.5, oracle::L_dip_03_xi05}, {0.3, 1.0, oracle::L_dip_03_xi1}, {1.5, 0.5, oracle::L_dip_15_xi05},
               {1.5, 1.0, oracle::L_dip_15_xi1},  {p2, 0.5, oracle::L_dip_p2_xi05},  {p2, 1.0, oracle::L_dip_p2_xi1}};
  for (const auto& c : cases) CHECK(L_integrand(c.p, dip, P, c.xi) == doctest::Approx(c.want).epsilon(1e-10));
}

TEST_CASE("m_factor vanishes linearly with xi") {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-3);
  for (double p : {0.4, 1.3, 6.0}) {
    const double r1 = m_factor(p, P, 1e-6) / 1e-6, r2 = m_factor(p, P, 2e-6) / 2e-6;
    CHECK(r1 > 0.0);
    CHECK(std::abs(r1 / r2 - 1.0) < 1e-4);
  }
}

TEST_CASE("L is nonnegative") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(0.0, 40.0), ux(0.05, 1.0);
  for (double g : {0.5, 0.99, 1.01, 2.0})
    for (double d : {1e-2, 1e-6, 1e-11}) {
      const Params P = Params::from_gamma(g * gs(), d);
      const auto dip = SourceSpec::dipole(1.2, 0.6, 0.8);
      const auto bump = SourceSpec::bump(1.2, 3.2);
      for (int i = 0; i < 100; ++i) {
        const double p = up(rng), xi = ux(rng);
        CHECK(L_integrand(p, dip, P, xi) >= 0.0);
        CHECK(L_integrand_l2(p, bump, P, xi) >= 0.0);
      }
    }
}

TEST_CASE("L decays at the net rate for large p") {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-3);
  for (double d0 : {1.2, 2.0}) {
    const auto dip = SourceSpec::dipole(d0, 1.0, 0.0);
    // log L = c - r p + m log p through three points
    const double p[3] = {60.0, 90.0, 120.0};
    double l[3];
    for (int i = 0; i < 3; ++i) l[i] = std::log(L_integrand(p[i], dip, P, 1.0));
    const double a0 = std::log(p[1] / p[0]), a1 = std::log(p[2] / p[1]);
    const double s0 = (l[1] - l[0]), s1 = (l[2] - l[1]);
    const double r = (s0 * a1 - s1 * a0) / ((p[2] - p[1]) * a0 - (p[1] - p[0]) * a1);
    CHECK(r == doctest::Approx(2.0 * P.gamma() * (d0 - 1.0)).epsilon(0.05));
  }
}

TEST_CASE("integrand peaks at the roots below gamma star") {
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  const Params P = Params::from_gamma(0.99 * gs(), 1e-4);
  const RootPair r = find_roots(P.gamma());
  const double mid = L_integrand(0.5 * (r.p1 + r.p2), dip, P, 1.0);
  CHECK(L_integrand(r.p1, dip, P, 1.0) > 1e3 * mid);
  CHECK(L_integrand(r.p2, dip, P, 1.0) > 1e3 * mid);

  double lo = HUGE_VAL, hi = 0.0;
  for (double d : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    const Params Q = Params::from_gamma(1.01 * gs(), d);
    double m = 0.0;
    for (double p = 1.0; p <= 5.0; p += 1e-3) m = std::max(m, L_integrand(p, dip, Q, 1.0));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK(hi < 10.0 * lo);
}

TEST_CASE("energy breakdown") {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-5);
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  const EnergyBreakdown e = energy(dip, P, 1.0);
  CHECK(e.total == doctest::Approx(e.small_p + e.large_p).epsilon(1e-14));
  CHECK(e.small_p > 0.0);
  REQUIRE(e.peak_contributions.size() == 2);
  CHECK(e.peak_contributions[0] + e.peak_contributions[1] <= e.large_p);
  CHECK(e.peak_contributions[0] + e.peak_contributions[1] > 0.9 * e.large_p);
  CHECK(e.quad_error_estimate < 1e-6 * e.total);

  const double e1 = energy(dip, P, 0.25).total, e2 = energy(dip, P, 0.5).total;
  CHECK(e1 <= e2);
  CHECK(e2 <= e.total);
  CHECK_THROWS_AS(energy(dip, P, 1.5), DomainError);
  CHECK_THROWS_AS(energy(dip, P, 0.0), DomainError);
}

TEST_CASE("energy regimes") {
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  auto E = [&](double g, double d) { return energy(dip, Params::from_gamma(g * gs(), d), 1.0); };
  CHECK(E(0.5, 1e-5).total >= 10.0 * E(0.5, 1e-3).total);
  const double b0 = E(1.01, 1e-12).total, b1 = E(1.01, 1e-10).total;
  CHECK(std::abs(b0 / b1 - 1.0) < 0.1);
  // small p does not care about the loss
  const double s0 = E(0.5, 1e-12).small_p, s1 = E(0.5, 1e-6).small_p;
  CHECK(std::abs(s0 / s1 - 1.0) < 0.05);
}

TEST_CASE("energy at the rounding floor still reports") {
  // peak width ~2e-11 at p ~ 2: quadrature nodes are rounded to a few parts in 1e5 of it
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  const EnergyBreakdown e = energy(dip, Params::from_gamma(0.99 * gs(), 1e-12), 1.0);
  CHECK(e.total > 0.0);
  CHECK(e.quad_error_estimate < 1e-4 * e.total);
}

TEST_CASE("real-space energy agrees with the spectral one") {
  const double a = 2.0;
  const Params P(a, 0.5 * gs() / a, 0.1);
  const auto bump = SourceSpec::bump(1.2 * a, 3.2 * a, 1e4, -1.0, 1.0, a);
  const double xi = 0.5 * a;
  const RealSpaceEnergy r = real_space_energy(bump, P, xi);
  CHECK(r.gradient == doctest::Approx(energy(bump, P, xi).total).epsilon(0.02));
  CHECK(r.l2 == doctest::Approx(energy_l2(bump, P, xi).total).epsilon(0.02));

  // the synthesized field is the field
  const double dp = 2.0 * std::numbers::pi / (P.k0() * r.period);
  const auto col = synthesized_column(bump, P, 0.75 * a, dp, static_cast<std::size_t>(r.ny));
  double vmax = 0.0;
  for (const cplx& v : col) vmax = std::max(vmax, std::abs(v));
  for (long j : {20L, 300L, r.ny - 45}) {
    const double y = (j < r.ny / 2 ? j : j - r.ny) * r.hy;
    CHECK(std::abs(col[j] - reconstruct(0.75 * a, y, bump, P)) < 1e-3 * vmax);
  }
}
