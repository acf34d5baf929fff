#include "slablens/panels.hpp"

#include <algorithm>
#include <cmath>

#include "slablens/dispersion.hpp"

namespace slab {

namespace {

// floor on the decay distance; points inside a source get algebraic decay only
constexpr double kMinDecay = 0.05;

double peak_top(const std::vector<cplx>& zeros) {
  double top = 1.0;
  for (cplx z : zeros) top = std::max(top, z.real());
  return top;
}

}  // namespace

double spectral_p_max(const Params& params, double decay_distance) {
  const double D = std::max(decay_distance, kMinDecay * params.a());
  const auto zeros = g_delta_zeros(params);
  return 1.5 * peak_top(zeros) + 45.0 / (params.k0() * D);
}

PanelPlan spectral_panels(const Params& params, double p_max) {
  PanelPlan plan;
  plan.zeros = g_delta_zeros(params);
  plan.p_max = p_max;
  double first = p_max;
  for (cplx z : plan.zeros) first = std::min(first, z.real());
  const double w1 = std::min(0.25, 0.25 * (first - 1.0));

  std::vector<double> br{0.0, 0.5 * (1.0 - w1), 1.0 - w1, 1.0 + w1, p_max};
  std::vector<double> anchors{1.0};
  for (cplx z : plan.zeros) anchors.push_back(z.real());
  std::sort(anchors.begin(), anchors.end());
  for (std::size_t j = 1; j < anchors.size(); ++j) {
    const double x = anchors[j];
    double span = 0.5 * (x - anchors[j - 1]);
    if (j + 1 < anchors.size()) span = std::min(span, 0.5 * (anchors[j + 1] - x));
    else span = std::min(span, 0.5 * x);
    double w = 0.0;
    for (cplx z : plan.zeros)
      if (z.real() == x) w = std::abs(z.imag());
    w = std::max(w, 1e-15 * x);
    br.push_back(x);
    for (double d = w; d < span; d *= 2.0) {
      br.push_back(x - d);
      br.push_back(x + d);
    }
    br.push_back(x - span);
    br.push_back(x + span);
    plan.windows.emplace_back(x - span, x + span);
  }
  // geometric steps up to p_max
  for (double t = 2.0 * std::max(peak_top(plan.zeros), 1.0); t < p_max; t *= 2.0) br.push_back(t);

  std::vector<double> keep;
  for (double b : br)
    if (b >= 0.0 && b <= p_max && !(b > 1.0 - w1 && b < 1.0 + w1)) keep.push_back(b);
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());

  for (std::size_t i = 0; i + 1 < keep.size(); ++i) {
    const double lo = keep[i], hi = keep[i + 1];
    if (lo == 1.0 - w1 && hi == 1.0 + w1) {
      plan.panels.push_back(Panel::sqrt_right(lo, 1.0));
      plan.panels.push_back(Panel::sqrt_left(1.0, hi));
    } else {
      plan.panels.push_back(Panel::linear(lo, hi));
    }
  }
  return plan;
}

}  // namespace slab
