#include "slablens/energy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "slablens/dispersion.hpp"
#include "slablens/field.hpp"
#include "slablens/numeric.hpp"
#include "slablens/panels.hpp"

namespace slab {

namespace {

// weight_plus multiplies the |D|^2 F + |S|^2 e F bracket, weight_cross the Im[...] term
double m_generic(double p, const Params& params, double xi, bool gradient) {
  if (!(p >= 0)) throw DomainError("m_factor: p must be >= 0");
  if (!(xi > 0 && xi <= params.a())) throw DomainError("m_factor: xi must lie in (0, a]");
  const double k = params.k0(), a = params.a(), delta = params.delta();
  const Nus n = nus(p, params);
  const DiffSum ds = diff_sum(p, n.nu_m, n.nu_s, delta);
  const double sr = n.nu_s.real(), si = n.nu_s.imag();

  // (1 - e^{-2 k sr xi}) / (2 sr)
  const double F = -std::expm1(-2.0 * k * sr * xi) / (2.0 * sr);
  // (1 - e^{-i theta}) / (2 si), theta = 2 k si xi, written without the 1/si
  const double th = 2.0 * k * si * xi;
  const cplx G = k * xi * cplx(std::sin(0.5 * th) * sinc(0.5 * th), sinc(th));

  const double dd = std::norm(ds.diff), ss = std::norm(ds.sum);
  const double bracket = dd * F + ss * std::exp(-4.0 * k * sr * (a - 0.5 * xi)) * F;
  const double cross = std::exp(-2.0 * k * sr * a) *
                       (std::conj(ds.sum) * ds.diff * std::polar(1.0, 2.0 * k * si * a) * G).imag();
  const double s2 = std::norm(n.nu_s), p2 = p * p;
  const double pre = (1.0 + delta * delta) / std::numbers::pi;
  if (gradient) return pre * ((s2 + p2) * bracket + 2.0 * (p2 - s2) * cross);
  return pre * (bracket + 2.0 * cross) / (k * k);
}

double L_generic(double p, const SourceSpec& src, const Params& params, double xi, bool gradient) {
  const double m = m_generic(p, params, xi, gradient);
  if (m == 0.0) return 0.0;
  const double ag = std::abs(g_delta(p, params));
  if (!(ag >= 1e-300)) throw PoleContactError("L_integrand: |g_delta| underflow at p = " + std::to_string(p));
  const ScaledComplex Ip = I_scaled(src, p, params), Im = I_scaled(src, -p, params);
  const double lp = Ip.is_zero() ? -HUGE_VAL : 2.0 * Ip.log_abs();
  const double lm = Im.is_zero() ? -HUGE_VAL : 2.0 * Im.log_abs();
  const double top = std::max(lp, lm);
  if (top == -HUGE_VAL) return 0.0;
  const double avg = 0.5 * (std::exp(lp - top) + std::exp(lm - top));
  const double nur = nus(p, params).nu_m.real();
  return avg * std::exp(top + 2.0 * params.gamma() * nur - 2.0 * std::log(ag)) * m;
}

EnergyBreakdown integrate(const SourceSpec& src, const Params& params, double xi, const QuadConfig& cfg,
                          bool gradient) {
  if (!(xi > 0 && xi <= params.a())) throw DomainError("energy: xi must lie in (0, a]");
  const PanelPlan plan = spectral_panels(params, spectral_p_max(params, src.d0() - params.a()));
  const std::size_t nz = plan.windows.size();
  auto f = [&](double p, cplx* out) {
    const double L = L_generic(p, src, params, xi, gradient);
    out[0] = p < 1.0 ? L : 0.0;
    out[1] = p > 1.0 ? L : 0.0;
    for (std::size_t j = 0; j < nz; ++j)
      out[2 + j] = (p > plan.windows[j].first && p < plan.windows[j].second) ? L : 0.0;
  };
  const AdaptResult r = adapt(f, 2 + nz, plan.panels, cfg, gk_rule<31>(), gradient ? "energy" : "energy_l2");
  EnergyBreakdown e;
  e.xi = xi;
  e.small_p = r.value[0].real();
  e.large_p = r.value[1].real();
  e.total = e.small_p + e.large_p;
  for (std::size_t j = 0; j < nz; ++j) {
    e.peak_contributions.push_back(r.value[2 + j].real());
    e.peak_locations.push_back(plan.zeros[j].real());
  }
  e.quad_error_estimate = r.err;
  return e;
}

std::mutex fftw_plan_mu;

}  // namespace

double m_factor(double p, const Params& params, double xi) { return m_generic(p, params, xi, true); }

double m_factor_l2(double p, const Params& params, double xi) { return m_generic(p, params, xi, false); }

double L_integrand(double p, const SourceSpec& source, const Params& params, double xi) {
  return L_generic(p, source, params, xi, true);
}

double L_integrand_l2(double p, const SourceSpec& source, const Params& params, double xi) {
  return L_generic(p, source, params, xi, false);
}

EnergyBreakdown energy(const SourceSpec& source, const Params& params, double xi, const QuadConfig& cfg) {
  return integrate(source, params, xi, cfg, true);
}

EnergyBreakdown energy_l2(const SourceSpec& source, const Params& params, double xi, const QuadConfig& cfg) {
  return integrate(source, params, xi, cfg, false);
}

// -- real-space check ---------------------------------------------------------

std::vector<cplx> synthesized_column(const SourceSpec& source, const Params& params, double x, double dp,
                                     std::size_t n) {
  std::vector<cplx> v(n);
  const long half = static_cast<long>(n / 2);
  for (long m = -half; m < static_cast<long>(n) - half; ++m)
    v[m < 0 ? n + m : m] = v_hat(x, m * dp, source, params).value();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mu);
    auto* d = reinterpret_cast<fftw_complex*>(v.data());
    plan = fftw_plan_dft_1d(static_cast<int>(n), d, d, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mu);
    fftw_destroy_plan(plan);
  }
  const double scale = params.k0() * dp / (2.0 * std::numbers::pi);
  for (cplx& c : v) c *= scale;
  return v;
}

namespace {

// smallest 2^a 3^b 5^c >= n
std::size_t fft_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best *= 2;
  for (std::size_t p5 = 1; p5 < best; p5 *= 5)
    for (std::size_t p3 = p5; p3 < best; p3 *= 3) {
      std::size_t m = p3;
      while (m < n) m *= 2;
      best = std::min(best, m);
    }
  return best;
}

}  // namespace

RealSpaceEnergy real_space_energy(const SourceSpec& source, const Params& params, double xi,
                                  const RealSpaceConfig& cfg) {
  const double a = params.a(), k = params.k0();
  if (!(xi > 0 && xi <= a)) throw DomainError("real_space_energy: xi must lie in (0, a]");
  RealSpaceEnergy out;

  double kappa = HUGE_VAL, top = 1.0;
  for (cplx z : g_delta_zeros(params)) {
    kappa = std::min(kappa, k * std::abs(z.imag()));
    top = std::max(top, z.real());
  }
  out.period = std::isfinite(kappa) ? cfg.y_decay / kappa : 400.0 * a;
  const double dp = 2.0 * std::numbers::pi / (k * out.period);
  const double p_cut = cfg.p_cut > 0 ? cfg.p_cut : 1.5 * top + 12.0 / (k * (source.d0() - a));
  const std::size_t n = cfg.log2_n > 0 ? std::size_t(1) << cfg.log2_n : fft_size(std::size_t(std::ceil(2.0 * p_cut / dp)));
  out.ny = static_cast<long>(n);
  out.hy = out.period / n;

  int nx = static_cast<int>(std::ceil(xi / (cfg.hx * a)));
  nx += nx % 2;
  out.nx = nx + 1;
  const double hx = xi / nx, x0 = a - xi, hy = out.hy;

  std::vector<std::vector<cplx>> ring(3);
  auto column = [&](int i) -> const std::vector<cplx>& { return ring[i % 3]; };
  auto node = [&](int i, int l, int c, int r, bool one_sided_left, bool one_sided_right) {
    const auto &L = column(l), &C = column(c), &R = column(r);
    const double w = (i == 0 || i == nx) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double g = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cplx dx;
      if (one_sided_left) dx = (-3.0 * C[j] + 4.0 * L[j] - R[j]) / (2.0 * hx);
      else if (one_sided_right) dx = (3.0 * C[j] - 4.0 * L[j] + R[j]) / (2.0 * hx);
      else dx = (R[j] - L[j]) / (2.0 * hx);
      const cplx dy = (C[(j + 1) % n] - C[(j + n - 1) % n]) / (2.0 * hy);
      g += std::norm(dx) + std::norm(dy);
      s2 += std::norm(C[j]);
    }
    out.gradient += w * hx / 3.0 * hy * g;
    out.l2 += w * hx / 3.0 * hy * s2;
  };
  for (int i = 0; i <= nx; ++i) {
    ring[i % 3] = synthesized_column(source, params, x0 + i * hx, dp, n);
    if (i == 2) node(0, 1, 0, 2, true, false);  // L = x1, R = x2
    if (i >= 2) node(i - 1, i - 2, i - 1, i, false, false);
  }
  node(nx, nx - 1, nx, nx - 2, false, true);  // L = x_{n-1}, R = x_{n-2}
  return out;
}

}  // namespace slab
