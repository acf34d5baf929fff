#include "slablens/kernel.hpp"

#include <cmath>

#include "slablens/numeric.hpp"

namespace slab {

char region_letter(Region r) {
  switch (r) {
    case Region::Core: return 'C';
    case Region::Shell: return 'S';
    case Region::Matrix: return 'M';
  }
  return '?';
}

Params::Params(double a, double k0, double delta) : a_(a), k0_(k0), delta_(delta) {
  if (!(std::isfinite(a) && a > 0)) throw DomainError("slab width a must be > 0");
  if (!(std::isfinite(k0) && k0 > 0)) throw DomainError("k0 must be > 0");
  if (!(std::isfinite(delta) && delta > 0 && delta < 1))
    throw DomainError("delta must lie in (0,1)");
}

Params Params::from_gamma(double gamma, double delta, double a) {
  return Params(a, gamma / a, delta);
}

cplx Params::permittivity(Region r) const {
  return r == Region::Shell ? cplx(-1.0, -delta_) : cplx(1.0, 0.0);
}

Region Params::region_of(double x) const {
  if (x < 0) return Region::Core;
  if (x <= a_) return Region::Shell;
  return Region::Matrix;
}

// ScaledComplex -------------------------------------------------------------

ScaledComplex::ScaledComplex(cplx mantissa, double log_scale) : m_(mantissa), s_(log_scale) {
  normalize();
}

void ScaledComplex::normalize() {
  if (m_ == cplx(0.0)) {
    s_ = 0.0;
    return;
  }
  const double a = std::abs(m_);
  if (!std::isfinite(a)) return;
  if (a < 1e-2 || a > 1e2) {
    m_ /= a;
    s_ += std::log(a);
  }
}

ScaledComplex ScaledComplex::exp(cplx z) { return ScaledComplex(std::polar(1.0, z.imag()), z.real()); }

double ScaledComplex::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(m_)) + s_;
}

cplx ScaledComplex::value() const {
  if (is_zero()) return cplx(0.0);
  return m_ * std::exp(s_);
}

ScaledComplex ScaledComplex::operator*(const ScaledComplex& o) const {
  return ScaledComplex(m_ * o.m_, s_ + o.s_);
}

ScaledComplex ScaledComplex::operator/(const ScaledComplex& o) const {
  return ScaledComplex(m_ / o.m_, s_ - o.s_);
}

ScaledComplex ScaledComplex::operator*(cplx c) const { return ScaledComplex(m_ * c, s_); }

ScaledComplex ScaledComplex::operator+(const ScaledComplex& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  const double s = std::max(s_, o.s_);
  return ScaledComplex(m_ * std::exp(s_ - s) + o.m_ * std::exp(o.s_ - s), s);
}

ScaledComplex ScaledComplex::operator-(const ScaledComplex& o) const {
  return *this + ScaledComplex(-o.m_, o.s_);
}

// square roots -------------------------------------------------------------

cplx principal_sqrt(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("principal_sqrt: non-finite argument");
  if (z.imag() == 0.0) {
    if (z.real() < 0) return cplx(0.0, std::sqrt(-z.real()));
    return cplx(std::sqrt(z.real()), 0.0);
  }
  return std::sqrt(z);
}

Nus nus(double p, const Params& params) {
  if (!(p >= 0)) throw DomainError("nus: p must be >= 0");
  const cplx nu = principal_sqrt(cplx((p - 1.0) * (p + 1.0), 0.0));
  const cplx sig = principal_sqrt(cplx(p * p + 1.0, params.delta()));
  return {nu, sig, nu};
}

Nus nus_complex(cplx p, double delta) {
  const cplx nu = principal_sqrt((p - 1.0) * (p + 1.0));
  const cplx sig = principal_sqrt(p * p + cplx(1.0, delta));
  return {nu, sig, nu};
}

DiffSum diff_sum(cplx p, cplx nu, cplx sigma, double delta) {
  const cplx pm1 = (p - 1.0) * (p + 1.0);
  const cplx beta = cplx(1.0, delta) * nu;
  const cplx sum = sigma + beta;
  // sigma^2 - beta^2 in closed form
  const cplx num = 2.0 + delta * delta * pm1 + cplx(0.0, delta) * (1.0 - 2.0 * pm1);
  return {num / sum, sum};
}

namespace {

cplx g_from(const DiffSum& ds, cplx sigma, double gamma) {
  const cplx e = std::exp(-2.0 * gamma * sigma);
  const CDD d2 = cmul_dd(ds.diff, ds.diff);
  const CDD s2 = cmul_dd(ds.sum, ds.sum);
  const CDD s2e = cmul_dd(s2, e);
  return (d2 - s2e).value();
}

}  // namespace

cplx g_delta(double p, double gamma, double delta) {
  if (!(p >= 0)) throw DomainError("g_delta: p must be >= 0");
  const cplx nu = principal_sqrt(cplx((p - 1.0) * (p + 1.0), 0.0));
  const cplx sig = principal_sqrt(cplx(p * p + 1.0, delta));
  return g_from(diff_sum(p, nu, sig, delta), sig, gamma);
}

cplx g_delta(double p, const Params& params) { return g_delta(p, params.gamma(), params.delta()); }

cplx g_delta_complex(cplx p, double gamma, double delta) {
  const Nus n = nus_complex(p, delta);
  return g_from(diff_sum(p, n.nu_m, n.nu_s, delta), n.nu_s, gamma);
}

cplx g_delta_derivative(cplx p, double gamma, double delta) {
  const Nus n = nus_complex(p, delta);
  const DiffSum ds = diff_sum(p, n.nu_m, n.nu_s, delta);
  const cplx e = std::exp(-2.0 * gamma * n.nu_s);
  const cplx dsig = p / n.nu_s;
  const cplx dbeta = cplx(1.0, delta) * p / n.nu_m;
  return 2.0 * ds.diff * (dsig - dbeta) - 2.0 * ds.sum * (dsig + dbeta) * e +
         2.0 * gamma * dsig * ds.sum * ds.sum * e;
}

double g_zero(double p, double gamma) {
  if (!(p >= 1)) throw DomainError("g_zero: real form needs p >= 1 (use g_zero_complex)");
  const double sp = std::sqrt(p * p + 1.0);
  const double sm = std::sqrt((p - 1.0) * (p + 1.0));
  const double sum = sp + sm;
  const double diff = 2.0 / sum;
  const DD d2 = mul_dd(diff, diff);
  const DD s2e = mul_dd(mul_dd(sum, sum), std::exp(-2.0 * gamma * sp));
  return (d2 - s2e).value();
}

cplx g_zero_complex(double p, double gamma) {
  if (!(p >= 0)) throw DomainError("g_zero: p must be >= 0");
  const cplx nu = principal_sqrt(cplx((p - 1.0) * (p + 1.0), 0.0));
  const cplx sig = cplx(std::sqrt(p * p + 1.0), 0.0);
  return g_from(diff_sum(p, nu, sig, 0.0), sig, gamma);
}

// spectral point -----------------------------------------------------------

SpectralPoint spectral_point(double p, const Params& params, std::optional<ScaledComplex> I) {
  const Nus n = nus(p, params);
  const double gamma = params.gamma();
  const double delta = params.delta();
  const double k = params.k0();
  const cplx eps = params.permittivity(Region::Shell);

  SpectralPoint sp;
  sp.p = p;
  sp.nu_c = n.nu_c;
  sp.nu_s = n.nu_s;
  sp.nu_m = n.nu_m;
  sp.alpha_pole = (n.nu_c == cplx(0.0));
  if (!sp.alpha_pole) sp.alpha = n.nu_s / (eps * n.nu_c);

  const DiffSum ds = diff_sum(p, n.nu_m, n.nu_s, delta);
  sp.R = ds.sum / ds.diff;
  const cplx e2 = std::exp(-2.0 * gamma * n.nu_s);
  const ScaledComplex grow = ScaledComplex::exp(gamma * n.nu_s);
  sp.psi_plus = grow * ((ds.diff + ds.sum * e2) / (2.0 * n.nu_s));
  sp.psi_minus = grow * ((ds.diff - ds.sum * e2) / (2.0 * eps));
  sp.g_delta = g_from(ds, n.nu_s, gamma);
  sp.degenerate = std::abs(p - 1.0) <= kEpsSwitch;

  if (sp.degenerate) {
    // A = I / (k psi^-) with psi^- taken at nu_m = 0
    const cplx one_minus = -cexpm1(-2.0 * gamma * n.nu_s);
    const ScaledComplex psi0 = grow * (n.nu_s * one_minus / (2.0 * eps));
    sp.A_over_I = ScaledComplex(1.0) / (psi0 * cplx(k));
  } else {
    sp.A_over_I = ScaledComplex::exp(gamma * (n.nu_m - n.nu_s)) *
                  (-2.0 * cplx(1.0, delta) * n.nu_s / (k * sp.g_delta));
  }
  if (I) sp.A = sp.A_over_I * *I;
  return sp;
}

}  // namespace slab
