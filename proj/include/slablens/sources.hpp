// Source zoo: dipole, smooth bump, the two busting sources and the
// divergence-free current.  Every extended kind is separable,
//   f^(x, q) = sum_k X_k(x) Q_k(q),
// with X_k piecewise polynomial on [d0, d1], so the s-moments are exact.
#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slablens/kernel.hpp"

namespace slab {

struct UnsupportedSource : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Dipole {
  double x0 = 1.2, y0 = 0.0;
  double dx = 1.0, dy = 0.0;
};

struct Bump {
  double C = 1e4;
  double d0 = 1.2, d1 = 3.2;
  double h0 = -1.0, h1 = 1.0;
};

struct SincBust {
  double d0 = 1.2, d1 = 3.2;
  double alpha1 = 0.0, alpha2 = 0.0;
};

struct BesselBust {
  double d0 = 1.2, d1 = 3.2;
  double beta0 = 0.0, beta1 = 0.0;
};

struct Current {
  double C = 1e3;
  double d0 = 1.2, d1 = 3.2;
  double alpha1 = 0.0, alpha2 = 0.0;
};

using SourceKind = std::variant<Dipole, Bump, SincBust, BesselBust, Current>;

//! Smallest positive zeros of J0 and J1.
inline constexpr double kJ0Zero1 = 2.404825557695773;
inline constexpr double kJ1Zero1 = 3.831705970207512;

/*!
 * \brief Immutable source description.
 *
 * The busting kinds take their alpha/beta from the roots of g0 at the
 * gamma of the Params they are built with.
 */
class SourceSpec {
 public:
  explicit SourceSpec(SourceKind kind, double a = 1.0);

  static SourceSpec dipole(double x0, double dx, double dy, double y0 = 0.0, double a = 1.0);
  static SourceSpec bump(double d0, double d1, double C = 1e4, double h0 = -1.0, double h1 = 1.0, double a = 1.0);
  static SourceSpec sinc_bust(const Params& params, double d0, double d1);
  static SourceSpec bessel_bust(const Params& params, double d0, double d1);
  static SourceSpec current(const Params& params, double d0, double d1, double C = 1e3);

  const SourceKind& kind() const { return kind_; }
  std::string name() const;
  double d0() const;
  double d1() const;
  bool is_dipole() const { return std::holds_alternative<Dipole>(kind_); }

 private:
  SourceKind kind_;
};

//! Point-source f^: f^ = w0 delta(x - x0) + w1 delta'(x - x0).
struct DipoleTransform {
  double x0;
  cplx w_delta, w_delta_prime;
};

//! Pointwise f^(x, q); throws UnsupportedSource for a dipole.
cplx f_hat(const SourceSpec& s, double x, double q);
DipoleTransform dipole_f_hat(const SourceSpec& s, double q);

//! I_q = int f^(s, q) e^{-k0 nu_m s} ds with q = k0 p; p < 0 stands for q < 0.
ScaledComplex I_scaled(const SourceSpec& s, double p, const Params& params);

struct MomentIntegrals {
  ScaledComplex minus;  //!< int_{d0}^{min(x,d1)} e^{-k0 nu s} f^ ds
  ScaledComplex plus;   //!< int_{d0}^{min(x,d1)} e^{+k0 nu s} f^ ds
  ScaledComplex rest;   //!< int_{max(x,d0)}^{d1} e^{-k0 nu s} f^ ds
};

MomentIntegrals moments(const SourceSpec& s, double x, double q, const Params& params);

//! nu_m = 0 limits: int (min(x,s) - a) f^ ds and int f^ ds.
struct DegenerateMoments {
  cplx green, total;
};
DegenerateMoments degenerate_moments(const SourceSpec& s, double x, double q, double a);

double spatial_density(const SourceSpec& s, double x, double y);
std::pair<double, double> current_components(const SourceSpec& s, double x, double y);

//! ||f||_{L2}; NaN for a dipole.
double norm_l2(const SourceSpec& s);

//! Exposed for tests.
namespace detail {
double bessel_j0(double x);
double bessel_j1(double x);
//! m-th derivative of the convolution of unit-mass boxes of half widths hw.
double box_spline(const std::vector<double>& hw, double y, int m = 0);
}  // namespace detail

}  // namespace slab
