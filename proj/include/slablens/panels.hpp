// Initial partitions of the p axis shared by field reconstruction and the
// energy integrals.
#pragma once

#include <utility>
#include <vector>

#include "slablens/kernel.hpp"
#include "slablens/quadrature.hpp"

namespace slab {

struct PanelPlan {
  std::vector<cplx> zeros;  //!< complex zeros of g_delta used for refinement
  double p_max = 0.0;
  std::vector<Panel> panels;
  std::vector<std::pair<double, double>> windows;  //!< refinement window around each zero, same order
};

//! Upper p limit: past the resonances the integrand decays like e^{-k0 D sqrt(p^2-1)}.
double spectral_p_max(const Params& params, double decay_distance);

/*!
 * [0, p_max] split with square-root maps on both sides of p = 1 and
 * dyadic breakpoints Re z +- |Im z| 2^m around every zero z of g_delta.
 */
PanelPlan spectral_panels(const Params& params, double p_max);

}  // namespace slab
