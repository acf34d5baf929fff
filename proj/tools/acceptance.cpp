// Runs every acceptance criterion of the primary component and prints one
// PASS/FAIL line each. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slablens/cli.hpp"
#include "slablens/dispersion.hpp"
#include "slablens/energy.hpp"
#include "slablens/field.hpp"
#include "slablens/sources.hpp"

using namespace slab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body, double budget_s = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && t > budget_s) {
    o.pass = false;
    o.detail += "; over the " + cli::fmt(budget_s) + " s budget";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), t);
  std::fflush(stdout);
}

std::string num(double v, int digits = 4) {
  char b[48];
  std::snprintf(b, sizeof b, "%.*g", digits, v);
  return b;
}

double gs() { return gamma_star().gamma_star; }

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

std::vector<double> fields(const std::string& row) {
  std::vector<double> v;
  std::istringstream in(row);
  for (std::string c; std::getline(in, c, ',');) v.push_back(std::strtod(c.c_str(), nullptr));
  return v;
}

Outcome gamma_star_criterion() {
  std::ostringstream out, err;
  const int code = cli::main_entry({"gamma-star"}, out, err);
  const auto rows = csv_rows(out.str());
  if (code != 0 || rows.size() != 2) return {false, "gamma-star exited " + std::to_string(code)};
  const double g = fields(rows[1]).at(0);
  return {std::abs(g - 0.9373) <= 5e-4, "gamma* = " + num(g, 8) + " (0.9373 +- 5e-4)"};
}

Outcome constants_criterion() {
  using namespace constants;
  bool ok = true;
  std::string d;
  auto near = [&](const char* what, double got, double want, double tol) {
    ok = ok && std::abs(got - want) <= tol;
    d += std::string(d.empty() ? "" : ", ") + what + " " + num(got, 6);
  };
  near("sqrt(e)/(e+1)", sqrt_e_threshold(), 0.4434, 1e-4);
  near("1/sqrt2", concavity_threshold(), 0.7071, 1e-4);
  near("closed form", concavity_closed_form(), 2.4370, 1e-3);
  near("numeric max", concavity_numeric_max(), concavity_closed_form(), 1e-3);
  near("dG2/ds", dG2_ds_at_threshold(), 0.2935, 1e-3);
  near("shell sum", shell_sum_bound(), 0.9813, 1e-3);
  double worst = HUGE_VAL;
  const double gmax = sqrt_e_threshold();
  for (int i = 0; i <= 400; ++i) {
    const double g = 0.02 + (gmax - 0.02) * i / 400.0;
    worst = std::min(worst, G0(1.0 / (g * g) - 1.0, g).real() * g * g);
  }
  ok = ok && worst >= 1.0479 - 1e-3;
  d += ", min G0(1/g^2-1) g^2 = " + num(worst, 6) + " (>= 1.0479 - 1e-3)";
  return {ok, d};
}

Outcome bifurcation_criterion() {
  std::mt19937_64 rng(3);
  const double g = gs();
  std::uniform_real_distribution<double> below(0.02, g - 1e-3), above(g + 1e-3, 4.0 * g);
  int bad = 0;
  double worst_res = 0.0;
  for (int i = 0; i < 50; ++i) {
    const RootPair r = find_roots(below(rng));
    if (r.status != RootStatus::TwoRoots || !(r.p1 > 1.0) || !(r.p2 > r.p1)) {
      ++bad;
      continue;
    }
    for (double p : {r.p1, r.p2}) {
      const double res = std::abs(g_zero(p, r.gamma)) / (1.0 + p * p);
      worst_res = std::max(worst_res, res);
      const double h = 1e-7 * p;
      if (!(res < 1e-10) || g_zero(p - h, r.gamma) * g_zero(p + h, r.gamma) >= 0) ++bad;
    }
  }
  for (int i = 0; i < 50; ++i)
    if (find_roots(above(rng)).status != RootStatus::NoRoots) ++bad;
  return {bad == 0, std::to_string(bad) + " bad of 100 gamma; worst |g0|/(1+p^2) at roots " + num(worst_res, 2)};
}

Outcome plancherel_criterion() {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-2);
  const auto bump = SourceSpec::bump(1.2, 3.2);
  const double xi = 0.5;
  const RealSpaceEnergy r = real_space_energy(bump, P, xi);
  const double e = energy(bump, P, xi).total, l2 = energy_l2(bump, P, xi).total;
  const double rg = r.gradient / e - 1.0, rl = r.l2 / l2 - 1.0;
  return {std::abs(rg) <= 0.02 && std::abs(rl) <= 0.02,
          "gradient " + num(100 * rg, 3) + "%, L2 " + num(100 * rl, 3) + "% (2%), grid " + std::to_string(r.nx) + " x " +
              std::to_string(r.ny)};
}

std::vector<SourceSpec> five_sources(const Params& P) {
  return {SourceSpec::dipole(1.2, 1.0, 0.0), SourceSpec::bump(1.2, 3.2), SourceSpec::sinc_bust(P, 1.2, 3.2),
          SourceSpec::bessel_bust(P, 1.2, 3.2), SourceSpec::current(P, 1.2, 3.2)};
}

Outcome residual_criterion() {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-3);
  bool ok = true;
  std::string d;
  for (const SourceSpec& s : five_sources(P)) {
    const ResidualReport r = residuals(s, P);
    ok = ok && r.continuity_max < 1e-4 && r.pde_max < 1e-3;
    d += s.name() + " " + num(r.continuity_max, 2) + "/" + num(r.pde_max, 2) + ", ";
  }
  const double k = 0.7, h = 1e-2;
  const cplx eps(-1.0, -1e-3), kk = k * std::sqrt(eps);
  std::array<cplx, 5> ux, uy;
  for (int j = 0; j < 5; ++j) {
    ux[j] = std::exp(cplx(0, 1) * kk * ((j - 2) * h));
    uy[j] = 1.0;
  }
  const double pw = std::abs(helmholtz_residual(ux, uy, h, k, eps));
  ok = ok && pw < 1e-10;
  return {ok, d + "plane wave " + num(pw, 2) + " (continuity < 1e-4, pde < 1e-3, plane wave < 1e-10)"};
}

Outcome regime_criterion() {
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  auto E = [&](double g, double d) { return energy(dip, Params::from_gamma(g * gs(), d), 1.0).total; };
  const double e3 = E(0.5, 1e-3), e5 = E(0.5, 1e-5), e7 = E(0.5, 1e-7);
  double lo = HUGE_VAL, hi = 0.0;
  for (double d : {1e-12, 1e-11, 1e-10}) {
    const double e = E(1.01, d);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const double spread = hi / lo - 1.0;
  return {e5 >= 10 * e3 && e7 >= 10 * e5 && spread < 0.1,
          "0.5 gamma*: x" + num(e5 / e3, 3) + ", x" + num(e7 / e5, 3) + " (>= 10 each); 1.01 gamma*: spread " +
              num(100 * spread, 2) + "% (< 10%)"};
}

Outcome shielding_criterion() {
  std::ostringstream out, err;
  const int code = cli::main_entry({"shielding-scan", "--gammas", "2gstar,3gstar,4gstar", "--delta", "1e-12"}, out, err);
  const auto rows = csv_rows(out.str());
  if (code != 0 || rows.size() != 4) return {false, "shielding-scan exited " + std::to_string(code)};
  std::vector<double> g, l;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto v = fields(rows[i]);
    g.push_back(v.at(0));
    l.push_back(std::log(v.at(1)));
  }
  const double gm = (g[0] + g[1] + g[2]) / 3, lm = (l[0] + l[1] + l[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (g[i] - gm) * (l[i] - lm);
    sxx += (g[i] - gm) * (g[i] - gm);
  }
  const double slope = sxy / sxx;
  const bool decreasing = l[1] < l[0] && l[2] < l[1];
  return {decreasing && slope <= -0.5, "sup|V_c| " + num(std::exp(l[0]), 3) + ", " + num(std::exp(l[1]), 3) + ", " +
                                           num(std::exp(l[2]), 3) + "; slope d log/d gamma " + num(slope, 3) +
                                           " (<= -0.5)"};
}

Outcome busting_criterion() {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-3), Q = Params::from_gamma(0.5 * gs(), 1e-7);
  const RootPair r = find_roots(P.gamma());
  bool ok = true;
  std::string d;
  const auto kinds = five_sources(P);
  for (std::size_t i = 2; i < kinds.size(); ++i) {
    const SourceSpec& s = kinds[i];
    const double nf = norm_l2(s);
    double ip = 0.0;
    for (double p : {r.p1, r.p2}) ip = std::max(ip, std::abs(I_scaled(s, p, P).value()) / nf);
    const double ratio = energy(s, Q, 1.0).total / energy(s, P, 1.0).total;
    ok = ok && ip < 1e-10 && ratio < 2.0;
    d += s.name() + " |I_p|/||f|| " + num(ip, 2) + " E ratio " + num(ratio, 3) + "; ";
  }
  // divergence of the current at random points against ||J||
  const SourceSpec& cs = kinds[4];
  const auto& c = std::get<Current>(cs.kind());
  const double ymax = 3 * c.alpha1 + 2 * c.alpha2;
  double jn = 0.0;
  const int nx = 400, ny = 800;
  const double hx = (c.d1 - c.d0) / nx, hy = 2 * ymax / ny;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const auto [a, b] = current_components(cs, c.d0 + (i + 0.5) * hx, -ymax + (j + 0.5) * hy);
      jn += (a * a + b * b) * hx * hy;
    }
  jn = std::sqrt(jn);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(c.d0, c.d1), uy(-ymax, ymax);
  const double h = 1e-4;
  double div = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = ux(rng), y = uy(rng);
    const double dj = current_components(cs, x + h, y).first - current_components(cs, x - h, y).first +
                      current_components(cs, x, y + h).second - current_components(cs, x, y - h).second;
    div = std::max(div, std::abs(dj / (2 * h)));
  }
  ok = ok && div < 1e-6 * jn;
  return {ok, d + "div J / ||J|| " + num(div / jn, 2) + " (|I_p| < 1e-10 ||f||, ratio < 2, div < 1e-6)"};
}

Outcome wavelength_criterion() {
  const Params P = Params::from_gamma(0.5 * gs(), 1e-9);
  const double want = P.k0() * find_roots(P.gamma()).p2;
  const auto dip = SourceSpec::dipole(1.2, 1.0, 0.0);
  // 48 periods of the expected wavelength, Hann window, DFT at the bin frequencies
  const int n = 1024;
  const double L = 48 * 2 * std::numbers::pi / want;
  std::vector<double> ys(n);
  for (int j = 0; j < n; ++j) ys[j] = -0.5 * L + L * j / n;
  const auto v = reconstruct_batch({P.a()}, ys, dip, P);
  double best = 0.0, best_w = 0.0;
  for (int m = 1; m < n / 2; ++m) {
    const double w = 2 * std::numbers::pi * m / L;
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double hann = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * j / n);
      s += hann * v[j].real() * std::polar(1.0, -w * ys[j]);
    }
    if (std::abs(s) > best) {
      best = std::abs(s);
      best_w = w;
    }
  }
  const double rel = best_w / want - 1.0;
  return {std::abs(rel) <= 0.1, "dominant " + num(best_w, 5) + " vs k0 p2 " + num(want, 5) + " (" +
                                    num(100 * rel, 2) + "%, within 10%)"};
}

Outcome conjecture_criterion() {
  std::vector<double> deltas, gammas;
  for (int i = 0; i < 9; ++i) deltas.push_back(1e-12 * std::pow(100.0, i / 8.0));
  for (int i = 0; i < 10; ++i) gammas.push_back((0.1 + 0.89 * i / 9.0) * gs());
  const auto rows = conjecture_scan(deltas, gammas);
  double worst = 0.0, min_m = HUGE_VAL;
  bool finite = true;
  for (double g : gammas)
    for (int root : {1, 2}) {
      double lo = HUGE_VAL, hi = 0.0;
      for (const auto& r : rows)
        if (r.gamma == g && r.root_index == root) {
          finite = finite && std::isfinite(r.g_ratio) && r.g_ratio > 0;
          lo = std::min(lo, r.g_ratio);
          hi = std::max(hi, r.g_ratio);
          min_m = std::min(min_m, r.m_value);
        }
      worst = std::max(worst, hi / lo - 1.0);
    }
  const bool ok = finite && rows.size() == 2 * deltas.size() * gammas.size() && worst < 0.5 && min_m > 0;
  return {ok, std::to_string(rows.size()) + " samples; worst |g|/delta variation " + num(100 * worst, 3) +
                  "% (< 50%); min M " + num(min_m, 3) + " (> 0)"};
}

Outcome bounds_criterion() {
  const BoundsReport r = bounds_audit(10000);
  std::string d;
  for (const auto& c : r.checks) d += c.name + " " + num(c.max_ratio, 3) + ", ";
  return {r.total_violations() == 0,
          std::to_string(r.total_violations()) + " violations in 1e4 samples per check; worst value/bound: " + d};
}

}  // namespace

int main() {
  std::printf("acceptance: primary component\n");
  criterion("gamma-star", gamma_star_criterion, 10.0);
  criterion("analytic-constants", constants_criterion);
  criterion("root-bifurcation", bifurcation_criterion, 30.0);
  criterion("plancherel", plancherel_criterion, 600.0);
  criterion("residual-suite", residual_criterion);
  criterion("regime-contrast", regime_criterion);
  criterion("shielding", shielding_criterion);
  criterion("busting", busting_criterion);
  criterion("resonant-wavelength", wavelength_criterion);
  criterion("conjecture-scans", conjecture_criterion);
  criterion("bounds-audit", bounds_criterion);
  criterion("no-secondary", [] {
    return Outcome{true, "this binary links only the core and CLI libraries; the plotting module is not built"};
  });
  std::printf("%d failed\n", failures);
  return failures;
}
