// Roots of g0 through G0(s) = s + sqrt(s^2-1) - exp(gamma sqrt(s+1)), s = p^2,
// the critical gamma*, and scans/audits built on them.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slablens/kernel.hpp"

namespace slab {

enum class RootStatus { TwoRoots, NoRoots, DoubleRootNear };
const char* root_status_name(RootStatus s);

struct RootStatusError : std::runtime_error {
  RootStatus status;
  RootStatusError(RootStatus s, const std::string& what) : std::runtime_error(what), status(s) {}
};

struct RootPair {
  double gamma = 0.0;
  double p1 = 0.0, p2 = 0.0;  // NaN for NoRoots; both the fold location for DoubleRootNear
  RootStatus status = RootStatus::NoRoots;
};

struct GammaStarResult {
  double gamma_star = 0.0;
  double lo = 0.0, hi = 0.0;
  double inner_max_s = 0.0;
};

cplx G0(double s, double gamma);
//! real branch, s >= 1
double G0_real(double s, double gamma);
double dG0_ds(double s, double gamma);
double d2G0_ds2(double s, double gamma);

struct G0Max {
  double s = 0.0, value = 0.0;
  double s_neg = 0.0;  //!< some s > s with G0 < 0 (right bracket end)
};
//! max over s > 1 (unique: G0 is unimodal there).
G0Max max_G0(double gamma);

//! Relative distance to gamma* below which roots are not refined.
inline constexpr double kFoldGuard = 1e-4;

RootPair find_roots(double gamma);

/*!
 * Complex zeros of g_delta near the real axis with Re p > 1: Newton from the
 * real roots of g0, or from the fold when gamma is just past gamma*.
 * Their imaginary parts set the width of the resonant peaks.
 */
std::vector<cplx> g_delta_zeros(const Params& params);

//! Memoized; first call solves the min-max problem.
const GammaStarResult& gamma_star();
GammaStarResult compute_gamma_star();
//! Installs a stored result (e.g. read from a cache) if gamma_star() has not run yet; true if it was used.
bool seed_gamma_star(const GammaStarResult& r);

//! 2 pi / (k0 p2); throws RootStatusError(NoRoots) for gamma above gamma*.
double lambda_gamma(const Params& params);

namespace constants {
double sqrt_e_threshold();     // sqrt(e)/(e+1)
double concavity_threshold();  // 1/sqrt(2)
double concavity_closed_form();
double concavity_numeric_max();  // max of e g (g^-2-2)^{3/2}(1-sqrt2 g) on the threshold interval
double dG2_ds_at_threshold();    // dG2/ds (1; sqrt(e)/(e+1))
double shell_sum_bound(double delta = 0.4);  // [(4+d^2)^{1/4} + sqrt(1+d^2)] e^{-gamma*}
double G0_interval_bound();      // 1 - e/(e+1) + sqrt(1 - 2e/(e+1)^2)
}  // namespace constants

struct ConjectureSample {
  double delta = 0.0, gamma = 0.0;
  int root_index = 1;
  double p_root = 0.0;
  double g_ratio = 0.0;
  double m_value = 0.0;
};

std::vector<ConjectureSample> conjecture_scan(const std::vector<double>& deltas,
                                              const std::vector<double>& gammas);

struct BoundsWitness {
  double p, delta, gamma;
};

struct BoundsCheck {
  std::string name;
  long samples = 0;
  long violations = 0;
  double max_ratio = 0.0;  //!< worst value/bound (>1 is a violation)
  std::optional<BoundsWitness> witness;
};

struct BoundsReport {
  std::vector<BoundsCheck> checks;
  long total_violations() const;
};

//! delta_gamma = min(0.4, m^2/M^2) from the g lower-bound construction.
double delta_gamma(double gamma);

//! Lower bound on |g_delta| - |g0|/2 for delta <= 0.4, p >= 1:
//! (sqrt(p^2+1)-sqrt(p^2-1))^2/2 - (1/2+3 sqrt(0.4)) (sqrt(p^2+1)+sqrt(p^2-1))^2 e^{-2 gamma sqrt(p^2+1)}.
double large_p_margin(double p, double gamma);

BoundsReport bounds_audit(long n_samples, std::uint64_t seed = 20240611);

}  // namespace slab
