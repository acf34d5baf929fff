// Error-free products and a few small complex helpers.
#pragma once

#include <cmath>
#include <complex>

namespace slab {

struct DD {
  double hi = 0.0, lo = 0.0;
  double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD mul_dd(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD mul_dd(const DD& a, double b) {
  DD p = mul_dd(a.hi, b);
  p.lo += a.lo * b;
  return two_sum(p.hi, p.lo);
}

inline DD add_dd(const DD& a, const DD& b) {
  DD s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return two_sum(s.hi, s.lo);
}

inline DD operator-(const DD& a, const DD& b) { return add_dd(a, {-b.hi, -b.lo}); }

struct CDD {
  DD re, im;
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

inline CDD operator-(const CDD& a, const CDD& b) { return {a.re - b.re, a.im - b.im}; }

inline CDD cmul_dd(std::complex<double> a, std::complex<double> b) {
  return {mul_dd(a.real(), b.real()) - mul_dd(a.imag(), b.imag()),
          add_dd(mul_dd(a.real(), b.imag()), mul_dd(a.imag(), b.real()))};
}

inline CDD cmul_dd(const CDD& a, std::complex<double> b) {
  return {mul_dd(a.re, b.real()) - mul_dd(a.im, b.imag()),
          add_dd(mul_dd(a.re, b.imag()), mul_dd(a.im, b.real()))};
}

//! exp(z) - 1 without cancellation for small |z|.
inline std::complex<double> cexpm1(std::complex<double> z) {
  if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
  // exp(x+iy)-1 = expm1(x) cos y + i e^x sin y  - 2 sin^2(y/2)
  const double x = z.real(), y = z.imag();
  const double sh = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * sh * sh, std::exp(x) * std::sin(y)};
}

//! sin(x)/x
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace slab
