#include "slablens/field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "slablens/numeric.hpp"
#include "slablens/panels.hpp"

namespace slab {

namespace {

const cplx kI(0.0, 1.0);

// per-|p| quantities shared by every x and both signs of q
struct Mode {
  SpectralPoint sp;
  DiffSum ds;
  cplx e2;  // e^{-2 gamma sigma}
  cplx T;   // (sigma^2 - beta^2)(1 - e2) / g
};

Mode prepare(double pabs, const Params& P) {
  Mode m;
  m.sp = spectral_point(pabs, P);
  m.ds = diff_sum(pabs, m.sp.nu_m, m.sp.nu_s, P.delta());
  m.e2 = std::exp(-2.0 * P.gamma() * m.sp.nu_s);
  m.T = m.ds.diff * m.ds.sum * -cexpm1(-2.0 * P.gamma() * m.sp.nu_s) / m.sp.g_delta;
  return m;
}

/*
 * M region, x > a:
 *   V = [e^{k nu x} rest(x) + e^{-k nu x} plus(x) - T I e^{k nu (2a - x)}] / (2 k nu)
 * i.e. free-space Green function plus the slab reflection.  Nothing grows.
 * At nu = 0 the bracket over nu is replaced by its limit.
 */
ScaledComplex assemble(double x, double p, const Mode& m, const ScaledComplex& I, const SourceSpec& src,
                       const Params& P) {
  const double k = P.k0(), a = P.a(), q = k * p;
  const cplx nu = m.sp.nu_m, sig = m.sp.nu_s;
  switch (P.region_of(x)) {
    case Region::Core:
      return m.sp.A_over_I * I * ScaledComplex::exp(k * nu * x);
    case Region::Shell: {
      const ScaledComplex A = m.sp.A_over_I * I;
      return A * ScaledComplex::exp(k * sig * x) * ((m.ds.diff + m.ds.sum * std::exp(-2.0 * k * sig * x)) / (2.0 * sig));
    }
    case Region::Matrix:
      break;
  }
  if (m.sp.degenerate) {
    const DegenerateMoments dm = degenerate_moments(src, x, q, a);
    const cplx kappa = -cplx(1.0, P.delta()) * (m.ds.diff + m.ds.sum * m.e2) / (k * m.sp.g_delta);
    return ScaledComplex(dm.green + kappa * dm.total);
  }
  const MomentIntegrals mom = moments(src, x, q, P);
  const cplx inv = 1.0 / (2.0 * k * nu);
  const ScaledComplex green = ScaledComplex::exp(k * nu * x) * mom.rest + ScaledComplex::exp(-k * nu * x) * mom.plus;
  return green * inv - I * ScaledComplex::exp(k * nu * (2.0 * a - x)) * (m.T * inv);
}

double decay_distance(const std::vector<double>& xs, const SourceSpec& src) {
  double D = HUGE_VAL;
  for (double x : xs) D = std::min(D, std::max({src.d0() - x, x - src.d1(), 0.0}));
  return D;
}

bool uniform(const std::vector<double>& ys, double& y0, double& dy) {
  if (ys.size() < 3) return false;
  y0 = ys.front();
  dy = (ys.back() - ys.front()) / (ys.size() - 1);
  const double tol = 1e-12 * (std::abs(ys.front()) + std::abs(ys.back()) + 1.0);
  for (std::size_t j = 0; j < ys.size(); ++j)
    if (std::abs(ys[j] - (y0 + dy * j)) > tol) return false;
  return true;
}

// V^(x, +q) and V^(x, -q) for each x
void spectrum(double p, const std::vector<double>& xs, const SourceSpec& src, const Params& P, cplx* hp, cplx* hm) {
  const Mode m = prepare(p, P);
  const ScaledComplex Ip = I_scaled(src, p, P), Im = I_scaled(src, -p, P);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    hp[i] = assemble(xs[i], p, m, Ip, src, P).value();
    hm[i] = assemble(xs[i], -p, m, Im, src, P).value();
  }
}

}  // namespace

void GridSpec::validate() const {
  if (!(x0 < x1) || !(y0 < y1)) throw DomainError("grid: need x0 < x1 and y0 < y1");
  if (nx < 2 || ny < 2) throw DomainError("grid: need nx, ny >= 2");
}

std::vector<double> GridSpec::xs() const {
  std::vector<double> v(nx);
  for (int i = 0; i < nx; ++i) v[i] = x(i);
  return v;
}

std::vector<double> GridSpec::ys() const {
  std::vector<double> v(ny);
  for (int j = 0; j < ny; ++j) v[j] = y(j);
  return v;
}

ScaledComplex v_hat(double x, double p, const SourceSpec& source, const Params& params) {
  if (!std::isfinite(x) || !std::isfinite(p)) throw DomainError("v_hat: non-finite argument");
  const Mode m = prepare(std::abs(p), params);
  return assemble(x, p, m, I_scaled(source, p, params), source, params);
}

std::vector<cplx> reconstruct_batch(const std::vector<double>& xs, const std::vector<double>& ys,
                                    const SourceSpec& source, const Params& params, const QuadConfig& cfg) {
  const std::size_t nx = xs.size(), ny = ys.size();
  if (nx == 0 || ny == 0) return {};
  const double k = params.k0();
  const PanelPlan plan = spectral_panels(params, spectral_p_max(params, decay_distance(xs, source)));

  // phase 1: adapt on the extreme y values (the most oscillatory outputs)
  std::vector<double> probes{*std::min_element(ys.begin(), ys.end()), *std::max_element(ys.begin(), ys.end())};
  if (probes[0] == probes[1]) probes.pop_back();
  const std::size_t np = probes.size();
  std::vector<cplx> hp(nx), hm(nx);
  auto probe_f = [&](double p, cplx* out) {
    spectrum(p, xs, source, params, hp.data(), hm.data());
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < np; ++j) {
        const cplx ph = std::polar(1.0, k * p * probes[j]);
        out[i * np + j] = hp[i] * ph + hm[i] * std::conj(ph);
      }
  };
  const AdaptResult ar = adapt(probe_f, nx * np, plan.panels, cfg, gk_rule<31>(), "reconstruct");

  // phase 2: final rule on every output
  std::vector<cplx> out(nx * ny, cplx(0.0));
  double y0 = 0, dy = 0;
  const bool uni = uniform(ys, y0, dy);
  std::vector<cplx> ph(ny);
  for (const Panel& pn : ar.panels) {
    for_each_node(pn, gk_rule<31>(), [&](double p, double wk, double) {
      spectrum(p, xs, source, params, hp.data(), hm.data());
      if (uni) {
        const cplx step = std::polar(1.0, k * p * dy);
        cplx cur;
        for (std::size_t j = 0; j < ny; ++j) {
          if (j % 128 == 0) cur = std::polar(1.0, k * p * (y0 + dy * j));
          ph[j] = cur;
          cur *= step;
        }
      } else {
        for (std::size_t j = 0; j < ny; ++j) ph[j] = std::polar(1.0, k * p * ys[j]);
      }
      for (std::size_t i = 0; i < nx; ++i) {
        const cplx a = wk * hp[i], b = wk * hm[i];
        cplx* row = out.data() + i * ny;
        for (std::size_t j = 0; j < ny; ++j) row[j] += a * ph[j] + b * std::conj(ph[j]);
      }
    });
  }
  const double scale = k / (2.0 * std::numbers::pi);
  for (cplx& v : out) v *= scale;
  return out;
}

cplx reconstruct(double x, double y, const SourceSpec& source, const Params& params, const QuadConfig& cfg) {
  return reconstruct_batch({x}, {y}, source, params, cfg)[0];
}

FieldGrid field_map(const GridSpec& grid, const SourceSpec& source, const Params& params, const QuadConfig& cfg,
                    int threads) {
  grid.validate();
  FieldGrid fg;
  fg.spec = grid;
  fg.values.assign(static_cast<std::size_t>(grid.nx) * grid.ny, cplx(0.0));
  fg.regions.resize(fg.values.size());
  const std::vector<double> ys = grid.ys();
  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = std::min(nt, grid.nx);
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (int i = next++; i < grid.nx; i = next++) {
      const double x = grid.x(i);
      try {
        const std::vector<cplx> col = reconstruct_batch({x}, ys, source, params, cfg);
        std::copy(col.begin(), col.end(), fg.values.begin() + static_cast<std::ptrdiff_t>(i) * grid.ny);
      } catch (const QuadratureError& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err)
          err = std::make_exception_ptr(
              QuadratureError(e.a, e.b, e.err, e.tol, "field_map column x=" + std::to_string(x)));
        return;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
      for (int j = 0; j < grid.ny; ++j) fg.regions[static_cast<std::size_t>(i) * grid.ny + j] = params.region_of(x);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return fg;
}

// -- residuals ---------------------------------------------------------------

cplx helmholtz_residual(const std::array<cplx, 5>& ux, const std::array<cplx, 5>& uy, double h, double k0, cplx eps) {
  auto d2 = [h](const std::array<cplx, 5>& u) {
    return (-u[0] + 16.0 * u[1] - 30.0 * u[2] + 16.0 * u[3] - u[4]) / (12.0 * h * h);
  };
  return d2(ux) + d2(uy) + k0 * k0 * eps * ux[2];
}

ResidualReport residuals(const SourceSpec& source, const Params& params, const QuadConfig& cfg,
                         const ResidualConfig& rcfg) {
  ResidualReport rep;
  const double a = params.a(), k = params.k0();
  const cplx eps_s = params.permittivity(Region::Shell);
  const std::vector<double>& ys = rcfg.ys;
  const std::size_t ny = ys.size();

  // interfaces: cubic extrapolation from 4 samples on each side
  {
    const double h = rcfg.h_interface;
    const double cv[4] = {4.0, -6.0, 4.0, -1.0};
    const double cd[4] = {-13.0 / 3.0, 19.0 / 2.0, -7.0, 11.0 / 6.0};
    for (double xi : {0.0, a}) {
      std::vector<double> xs;
      for (int j = 4; j >= 1; --j) xs.push_back(xi - j * h);
      for (int j = 1; j <= 4; ++j) xs.push_back(xi + j * h);
      const std::vector<cplx> V = reconstruct_batch(xs, ys, source, params, cfg);
      const cplx eps_l = xi == 0.0 ? cplx(1.0) : eps_s, eps_r = xi == 0.0 ? eps_s : cplx(1.0);
      double vmax = 0, fmax = 0, dv = 0, df = 0;
      for (std::size_t iy = 0; iy < ny; ++iy) {
        cplx vl = 0, vr = 0, gl = 0, gr = 0;
        for (int j = 0; j < 4; ++j) {
          const cplx L = V[(3 - j) * ny + iy], R = V[(4 + j) * ny + iy];
          vl += cv[j] * L;
          vr += cv[j] * R;
          gl -= cd[j] * L / h;
          gr += cd[j] * R / h;
        }
        const cplx fl = gl / eps_l, fr = gr / eps_r;
        vmax = std::max({vmax, std::abs(vl), std::abs(vr)});
        fmax = std::max({fmax, std::abs(fl), std::abs(fr)});
        dv = std::max(dv, std::abs(vl - vr));
        df = std::max(df, std::abs(fl - fr));
      }
      if (vmax > 0) rep.continuity_max = std::max(rep.continuity_max, dv / vmax);
      if (fmax > 0) rep.continuity_max = std::max(rep.continuity_max, df / fmax);
    }
  }

  // interior patches
  {
    const double h = rcfg.h_pde;
    std::vector<double> centres{-0.5 * a, 0.5 * a, source.d1() + std::max(1.0 * a, 10.0 * h)};
    if (source.d0() - a >= 1.0 * a) centres.push_back(0.5 * (a + source.d0()));
    std::vector<double> yy;
    for (double y : ys)
      for (int j = -2; j <= 2; ++j) yy.push_back(y + j * h);
    for (double xc : centres) {
      std::vector<double> xs;
      for (int j = -2; j <= 2; ++j) xs.push_back(xc + j * h);
      const std::vector<cplx> V = reconstruct_batch(xs, yy, source, params, cfg);
      const std::size_t m = yy.size();
      const cplx eps = params.permittivity(params.region_of(xc));
      double vmax = 0, rmax = 0;
      for (std::size_t iy = 0; iy < ny; ++iy) {
        std::array<cplx, 5> ux, uy;
        for (int j = 0; j < 5; ++j) {
          ux[j] = V[j * m + iy * 5 + 2];
          uy[j] = V[2 * m + iy * 5 + j];
        }
        vmax = std::max(vmax, std::abs(ux[2]));
        rmax = std::max(rmax, std::abs(helmholtz_residual(ux, uy, h, k, eps)));
      }
      if (vmax > 0) rep.pde_max = std::max(rep.pde_max, rmax / (k * k * vmax));
    }
  }

  // outgoing: single modes beyond the slab and beyond the source are pure e^{-k nu |x|}
  for (double p : {0.3, 0.7, 1.6, 3.0}) {
    const cplx nu = nus(p, params).nu_m;
    const cplx expect = std::exp(-k * nu);
    const double xm = source.d1() + 1.0;
    const cplx rc = (v_hat(-2.0, p, source, params) / v_hat(-1.0, p, source, params)).value();
    const cplx rm = (v_hat(xm + 1.0, p, source, params) / v_hat(xm, p, source, params)).value();
    rep.outgoing_decay = std::max({rep.outgoing_decay, std::abs(rc - expect) / std::abs(expect),
                                   std::abs(rm - expect) / std::abs(expect)});
  }
  return rep;
}

}  // namespace slab
