// Field assembly in the three regions and inverse-Fourier reconstruction.
#pragma once

#include <array>
#include <vector>

#include "slablens/kernel.hpp"
#include "slablens/quadrature.hpp"
#include "slablens/sources.hpp"

namespace slab {

struct GridSpec {
  double x0 = -1.0, x1 = 2.0;
  int nx = 2;
  double y0 = -1.0, y1 = 1.0;
  int ny = 2;

  void validate() const;
  double x(int i) const { return x0 + (x1 - x0) * i / (nx - 1); }
  double y(int j) const { return y0 + (y1 - y0) * j / (ny - 1); }
  std::vector<double> xs() const;
  std::vector<double> ys() const;
  bool operator==(const GridSpec&) const = default;
};

struct FieldGrid {
  GridSpec spec;
  std::vector<cplx> values;     //!< row-major in x: values[i * ny + j]
  std::vector<Region> regions;  //!< per node
  cplx at(int i, int j) const { return values[static_cast<std::size_t>(i) * spec.ny + j]; }
};

/*!
 * V^(x, q) with q = k0 p; negative p stands for negative q.
 * Region by x: C for x < 0, S for 0 <= x <= a, M beyond.
 */
ScaledComplex v_hat(double x, double p, const SourceSpec& source, const Params& params);

cplx reconstruct(double x, double y, const SourceSpec& source, const Params& params, const QuadConfig& cfg = {});

/*!
 * V on the tensor product xs x ys with one shared p partition, so errors are
 * smooth across the batch (finite differences stay meaningful).
 * Result is row-major in x.
 */
std::vector<cplx> reconstruct_batch(const std::vector<double>& xs, const std::vector<double>& ys,
                                    const SourceSpec& source, const Params& params, const QuadConfig& cfg = {});

//! Columns in parallel; bitwise independent of the thread count. threads <= 0 uses hardware concurrency.
FieldGrid field_map(const GridSpec& grid, const SourceSpec& source, const Params& params, const QuadConfig& cfg = {},
                    int threads = 0);

struct ResidualReport {
  double continuity_max = 0.0;
  double pde_max = 0.0;
  double outgoing_decay = 0.0;
};

struct ResidualConfig {
  double h_interface = 1e-3;  //!< one-sided stencils at x = 0, a
  double h_pde = 1e-2;        //!< fourth-order cross stencil
  std::vector<double> ys{-1.3, -0.4, 0.0, 0.6, 1.7};
};

//! 4th-order residual of Lap V + k0^2 eps V at the centre of a cross; u[2] is the centre in both.
cplx helmholtz_residual(const std::array<cplx, 5>& along_x, const std::array<cplx, 5>& along_y, double h, double k0,
                        cplx eps);

ResidualReport residuals(const SourceSpec& source, const Params& params, const QuadConfig& cfg = {},
                         const ResidualConfig& rcfg = {});

}  // namespace slab
