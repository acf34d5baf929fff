// Spectral energy in the strip a - xi < x < a.
#pragma once

#include <stdexcept>
#include <vector>

#include "slablens/kernel.hpp"
#include "slablens/quadrature.hpp"
#include "slablens/sources.hpp"

namespace slab {

//! (1+delta^2)/pi |D|^2 {...}: the p-dependent factor of the gradient energy integrand.
//! At xi = a this is M_delta(p; gamma).
double m_factor(double p, const Params& params, double xi);
//! Same for the L2 norm of V (carries an extra 1/k0^2).
double m_factor_l2(double p, const Params& params, double xi);

//! |g_delta| below 1e-300: the p grid touched a zero of g.
struct PoleContactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/*!
 * Energy density in p, so that E = int_0^inf L dp:
 *   L = (|I(q)|^2 + |I(-q)|^2)/2 e^{2 gamma Re nu_m} / |g_delta|^2 * m_factor.
 * Exponents are combined in log space before exponentiating.
 */
double L_integrand(double p, const SourceSpec& source, const Params& params, double xi);
double L_integrand_l2(double p, const SourceSpec& source, const Params& params, double xi);

struct EnergyBreakdown {
  double xi = 0.0;
  double total = 0.0;
  double small_p = 0.0;  //!< p < 1
  double large_p = 0.0;  //!< p > 1
  std::vector<double> peak_contributions;  //!< one per zero of g_delta, over its refinement window
  std::vector<double> peak_locations;
  double quad_error_estimate = 0.0;
};

//! int_{S_xi} |grad V|^2.
EnergyBreakdown energy(const SourceSpec& source, const Params& params, double xi, const QuadConfig& cfg = {});
//! int_{S_xi} |V|^2.
EnergyBreakdown energy_l2(const SourceSpec& source, const Params& params, double xi, const QuadConfig& cfg = {});

struct RealSpaceConfig {
  double hx = 0.02;           //!< x step in units of a; Simpson in x, so (xi/a)/hx is rounded up to even
  double y_decay = 18.0;      //!< period in y covers this many e-foldings of the slowest resonant mode
  double p_cut = 0.0;         //!< 0: chosen from the decay of the field in the strip
  int log2_n = 0;             //!< 0: smallest power of two that keeps hy <= pi / (k0 p_cut)
};

struct RealSpaceEnergy {
  double gradient = 0.0;  //!< sum of |D_x V|^2 + |D_y V|^2 over the grid
  double l2 = 0.0;
  int nx = 0;
  long ny = 0;
  double hy = 0.0, period = 0.0;
};

/*!
 * Independent check of energy(): V sampled on a uniform (x, y) grid over one
 * period in y, with V(x, .) synthesized by an inverse FFT of v_hat on a
 * uniform p grid, then derivatives by finite differences and sums by
 * Simpson (x) and the rectangle rule (y, periodic).
 */
RealSpaceEnergy real_space_energy(const SourceSpec& source, const Params& params, double xi,
                                  const RealSpaceConfig& cfg = {});

//! One column of the synthesized field: V(x, j hy) for j in [0, n), wrapped so negative y sit at the end.
std::vector<cplx> synthesized_column(const SourceSpec& source, const Params& params, double x, double dp,
                                     std::size_t n);

}  // namespace slab
