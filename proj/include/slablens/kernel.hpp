/*
 * Per-p transform-domain quantities for the slab problem
 *
 *   eps = 1 (x < 0),  -1 - i delta (0 < x < a),  1 (x > a)
 *
 * with q = k0 p the Fourier variable dual to y.
 */
#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace slab {

using cplx = std::complex<double>;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

enum class Region { Core, Shell, Matrix };

char region_letter(Region r);

/*! \brief Slab width, wavenumber and loss. gamma() is always k0*a. */
class Params {
 public:
  Params(double a, double k0, double delta);
  static Params from_gamma(double gamma, double delta, double a = 1.0);

  double a() const { return a_; }
  double k0() const { return k0_; }
  double delta() const { return delta_; }
  double gamma() const { return k0_ * a_; }

  cplx permittivity(Region r) const;
  Region region_of(double x) const;

  bool operator==(const Params&) const = default;

 private:
  double a_, k0_, delta_;
};

/*! \brief value = mantissa * exp(log_scale), 1e-2 <= |mantissa| <= 1e2 unless zero. */
class ScaledComplex {
 public:
  ScaledComplex() = default;
  ScaledComplex(cplx mantissa, double log_scale = 0.0);

  static ScaledComplex exp(cplx z);

  cplx mantissa() const { return m_; }
  double log_scale() const { return s_; }
  bool is_zero() const { return m_ == cplx(0.0); }
  double log_abs() const;
  cplx value() const;

  ScaledComplex operator*(const ScaledComplex& o) const;
  ScaledComplex operator/(const ScaledComplex& o) const;
  ScaledComplex operator+(const ScaledComplex& o) const;
  ScaledComplex operator-(const ScaledComplex& o) const;
  ScaledComplex operator*(cplx c) const;
  ScaledComplex conj() const { return ScaledComplex(std::conj(m_), s_); }

 private:
  void normalize();
  cplx m_{0.0};
  double s_ = 0.0;
};

//! Principal root, arg in (-pi/2, pi/2]; -1 -> i whatever the sign of the zero imaginary part.
cplx principal_sqrt(cplx z);

struct Nus {
  cplx nu_c, nu_s, nu_m;
};

Nus nus(double p, const Params& params);
//! Same with a complex p (used for the pole search).
Nus nus_complex(cplx p, double delta);

//! |p - 1| at or below this uses the nu_m -> 0 limit.
inline constexpr double kEpsSwitch = 1e-8;

struct SpectralPoint {
  double p = 0.0;
  cplx nu_c, nu_s, nu_m;
  bool alpha_pole = false;  //!< nu_c == 0: alpha not finite
  cplx alpha;               //!< valid only when !alpha_pole
  cplx R;
  ScaledComplex psi_plus, psi_minus;
  cplx g_delta;
  bool degenerate = false;  //!< |p-1| <= kEpsSwitch
  ScaledComplex A_over_I;   //!< A_q / I_q
  std::optional<ScaledComplex> A;  //!< set when I was supplied
};

SpectralPoint spectral_point(double p, const Params& params,
                             std::optional<ScaledComplex> I = std::nullopt);

//! sigma - (1+i delta) nu and sigma + (1+i delta) nu without cancellation.
struct DiffSum {
  cplx diff, sum;
};
DiffSum diff_sum(cplx p, cplx nu, cplx sigma, double delta);

cplx g_delta(double p, const Params& params);
cplx g_delta(double p, double gamma, double delta);
cplx g_delta_complex(cplx p, double gamma, double delta);
//! dg/dp for complex p.
cplx g_delta_derivative(cplx p, double gamma, double delta);

double g_zero(double p, double gamma);
cplx g_zero_complex(double p, double gamma);

}  // namespace slab
