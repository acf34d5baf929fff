#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle_values.hpp"
#include "slablens/kernel.hpp"

using namespace slab;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("principal_sqrt branch") {
  CHECK(principal_sqrt(-1.0) == cplx(0, 1));
  CHECK(principal_sqrt(cplx(-1.0, -0.0)) == cplx(0, 1));
  CHECK(principal_sqrt(4.0) == cplx(2, 0));
  CHECK(std::abs(principal_sqrt(cplx(0, 2)) - cplx(1, 1)) < 1e-15);
  CHECK_THROWS_AS(principal_sqrt(cplx(NAN, 0)), DomainError);
  CHECK_THROWS_AS(principal_sqrt(cplx(1, INFINITY)), DomainError);
}

TEST_CASE("principal_sqrt random property") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1), e(-30, 30);
  int bad = 0;
  for (int i = 0; i < 100000; ++i) {
    const cplx z = cplx(u(rng), u(rng)) * std::pow(10.0, e(rng) / 3);
    const cplx r = principal_sqrt(z);
    if (r.real() < 0 || std::abs(r * r - z) > 1e-15 * 2 * std::abs(z)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("nus examples") {
  const Params pr(1, 1, 1e-300 + 1e-16);
  auto n = nus(0, pr);
  CHECK(std::abs(n.nu_c - cplx(0, 1)) < 1e-15);
  CHECK(std::abs(n.nu_s - 1.0) < 1e-15);
  n = nus(1, pr);
  CHECK(n.nu_c == cplx(0));
  CHECK(std::abs(n.nu_s - std::sqrt(2.0)) < 1e-15);
  n = nus(std::sqrt(2.0), pr);
  CHECK(std::abs(n.nu_c - 1.0) < 1e-15);
  CHECK(std::abs(n.nu_s - std::sqrt(3.0)) < 1e-15);
  CHECK_THROWS_AS(nus(-0.1, pr), DomainError);
  for (double p : {0.0, 0.3, 1.0, 1.7, 40.0, 1e4}) {
    const Params q(1, 0.7, 0.3);
    auto m = nus(p, q);
    CHECK(m.nu_c == m.nu_m);
    CHECK(m.nu_c.real() >= 0);
    CHECK(m.nu_s.real() >= 0);
    CHECK(std::abs(m.nu_s * m.nu_s - cplx(p * p + 1, 0.3)) <= 4e-16 * (p * p + 1));
  }
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(Params(0, 1, 0.1), DomainError);
  CHECK_THROWS_AS(Params(1, -1, 0.1), DomainError);
  CHECK_THROWS_AS(Params(1, 1, 0), DomainError);
  CHECK_THROWS_AS(Params(1, 1, 1), DomainError);
  const Params p = Params::from_gamma(0.5, 1e-3, 2.0);
  CHECK(p.gamma() == p.k0() * p.a());
  CHECK(p.region_of(-0.1) == Region::Core);
  CHECK(p.region_of(0.0) == Region::Shell);
  CHECK(p.region_of(2.0) == Region::Shell);
  CHECK(p.region_of(2.01) == Region::Matrix);
  CHECK(p.permittivity(Region::Shell) == cplx(-1, -1e-3));
}

TEST_CASE("ScaledComplex ledger") {
  const ScaledComplex big = ScaledComplex::exp(cplx(2000, 0.3));
  CHECK(std::abs(big.log_abs() - 2000) < 1e-12);
  const ScaledComplex small = ScaledComplex::exp(cplx(-1995, -0.3));
  const cplx prod = (big * small).value();
  CHECK(std::abs(prod - std::exp(5.0)) < 1e-10 * std::exp(5.0));
  const ScaledComplex x(cplx(3e5, -4e5), 1.5);
  CHECK(std::abs(x.mantissa()) <= 1e2);
  CHECK(rel(x.value(), cplx(3e5, -4e5) * std::exp(1.5)) < 1e-15);
  const ScaledComplex s = x + ScaledComplex(cplx(1, 0), 0);
  CHECK(rel(s.value(), cplx(3e5, -4e5) * std::exp(1.5) + 1.0) < 1e-15);
  CHECK(ScaledComplex().is_zero());
  CHECK((x - x).is_zero());
}

TEST_CASE("spectral_point at p=0") {
  const Params pr = Params::from_gamma(1.0, 1e-15);
  const auto sp = spectral_point(0, pr);
  CHECK(!sp.alpha_pole);
  CHECK(std::abs(sp.alpha - cplx(0, 1)) < 1e-12);
  CHECK(std::abs(sp.R - cplx(0, 1)) < 1e-12);
  CHECK(std::abs(sp.R - (sp.alpha - 1.0) / (sp.alpha + 1.0)) < 1e-12);
}

TEST_CASE("spectral_point R identity") {
  for (double p : {0.2, 0.9, 1.3, 5.0}) {
    const auto sp = spectral_point(p, Params::from_gamma(0.6, 1e-3));
    CHECK(rel(sp.R, (sp.alpha - 1.0) / (sp.alpha + 1.0)) < 1e-12);
  }
}

TEST_CASE("A at p=2 matches oracle") {
  const double g = 0.5 * oracle::gamma_star;
  const Params pr = Params::from_gamma(g, 1e-6);
  const double nu = std::sqrt(3.0);
  const cplx I = g * nu * std::exp(-g * nu * 1.2);
  const auto sp = spectral_point(2, pr, ScaledComplex(I));
  REQUIRE(sp.A);
  CHECK(rel(sp.A->value(), cplx(oracle::A_p2_re, oracle::A_p2_im)) < 1e-10);
}

TEST_CASE("A from generic formula agrees with nu psi+ + psi-") {
  const Params pr = Params::from_gamma(0.8, 1e-2);
  for (double p : {0.4, 1.5, 3.0}) {
    const auto sp = spectral_point(p, pr);
    const ScaledComplex den = (sp.psi_plus * sp.nu_m + sp.psi_minus) * cplx(pr.k0());
    const ScaledComplex direct = ScaledComplex::exp(pr.k0() * sp.nu_m * pr.a()) / den;
    CHECK(rel(sp.A_over_I.value(), direct.value()) < 1e-11);
  }
}

TEST_CASE("degenerate branch consistency") {
  const Params pr = Params::from_gamma(0.6, 1e-3);
  const auto s0 = spectral_point(1.0, pr);
  CHECK(s0.degenerate);
  CHECK(s0.alpha_pole);
  const cplx eps(-1, -1e-3);
  const cplx psim = s0.nu_s / eps * std::exp(pr.gamma() * s0.nu_s) / 2.0 *
                    (1.0 - std::exp(-2.0 * pr.gamma() * s0.nu_s));
  CHECK(rel(s0.A_over_I.value(), 1.0 / (pr.k0() * psim)) < 1e-13);
  for (double p : {1 - 1e-9, 1 + 1e-9}) {
    const auto s = spectral_point(p, pr);
    CHECK(rel(s.A_over_I.value(), s0.A_over_I.value()) < 1e-6);
  }
  const auto s1 = spectral_point(1 + 1e-7, pr);
  CHECK(!s1.degenerate);
  // A/I - A/I(1) is O(nu_m) off the switch
  CHECK(rel(s1.A_over_I.value(), s0.A_over_I.value()) < 10 * std::abs(s1.nu_m));
}

TEST_CASE("no overflow for large p") {
  for (double g : {0.1, 1.0, 10.0}) {
    for (double p : {50.0, 400.0, 1e4}) {
      const auto sp = spectral_point(p, Params::from_gamma(g, 1e-12));
      CHECK(std::isfinite(sp.psi_plus.log_abs()));
      CHECK(std::isfinite(sp.psi_minus.log_abs()));
      CHECK(std::isfinite(sp.A_over_I.log_abs()));
      CHECK(std::isfinite(std::abs(sp.g_delta)));
    }
  }
}

TEST_CASE("g_delta examples") {
  const cplx want = cplx(0, -2) * (1 + std::exp(-2.0));
  CHECK(std::abs(g_delta(0, 1.0, 0.0) - want) < 1e-14);
  CHECK(rel(g_delta(0, 1.0, 0.0), cplx(oracle::g_p0_g1_re, oracle::g_p0_g1_im)) < 1e-14);
  CHECK(std::abs(g_zero_complex(0, 1.0) - want) < 1e-14);
  CHECK(std::abs(g_zero(oracle::p1_half, 0.5 * oracle::gamma_star)) < 1e-10);
  CHECK(std::abs(g_zero(oracle::p2_half, 0.5 * oracle::gamma_star)) < 1e-10);
  const double g2 = 2 * oracle::gamma_star;
  const cplx gd = g_delta(2, g2, 1e-12);
  CHECK(std::abs(gd - g_zero(2, g2)) <= 1e-10);
  CHECK(rel(gd, cplx(oracle::g_p2_2gs_d12_re, oracle::g_p2_2gs_d12_im)) < 1e-13);
  CHECK(std::abs(std::abs(gd - g_zero(2, g2)) - oracle::gdiff_p2_2gs) < 1e-15);
}

TEST_CASE("g_delta keeps digits of O(delta) values") {
  const double g = 0.5 * oracle::gamma_star;
  const double r1 = std::abs(g_delta(oracle::p1_half, g, 1e-11)) / 1e-11;
  CHECK(std::abs(r1 - oracle::gratio_p1_d11) < 1e-4 * oracle::gratio_p1_d11);
  const double r2 = std::abs(g_delta(oracle::p2_half, g, 1e-10)) / 1e-10;
  CHECK(std::abs(r2 - oracle::gratio_p2_d10) < 1e-4 * oracle::gratio_p2_d10);
  const double r3 = std::abs(g_delta(oracle::p2_half, g, 1e-12)) / 1e-12;
  CHECK(std::abs(r3 - oracle::gratio_p2_d12) < 1e-4 * oracle::gratio_p2_d12);
}

TEST_CASE("g_zero") {
  for (double g : {0.2, 1.0, 3.0})
    CHECK(std::abs(g_zero(1, g) - 2 * (1 - std::exp(-2 * std::sqrt(2.0) * g))) < 1e-15);
  CHECK_THROWS_AS(g_zero(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(g_zero_complex(-0.5, 1.0), DomainError);
  const double g = 0.5 * oracle::gamma_star;
  CHECK(g_zero(3, g) * g_zero(20, g) < 0);
}

TEST_CASE("delta continuity envelope") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(0, 10), ug(0.1, 3), ud(-12, -4);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double p = up(rng), g = ug(rng), d = std::pow(10.0, ud(rng));
    const cplx diff = g_delta(p, g, d) - g_zero_complex(p, g);
    if (std::abs(diff) > 10 * d * (1 + p * p)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("derivative of g matches finite difference") {
  const double g = 0.5 * oracle::gamma_star;
  for (cplx z : {cplx(1.2, 1e-3), cplx(12.0, -0.01), cplx(3.0, 0.2)}) {
    const double h = 1e-6;
    const cplx fd = (g_delta_complex(z + h, g, 1e-3) - g_delta_complex(z - h, g, 1e-3)) / (2 * h);
    CHECK(rel(g_delta_derivative(z, g, 1e-3), fd) < 1e-7);
  }
}
