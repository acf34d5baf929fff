#include "slablens/dispersion.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>

#include "slablens/energy.hpp"

namespace slab {

const char* root_status_name(RootStatus s) {
  switch (s) {
    case RootStatus::TwoRoots: return "TwoRoots";
    case RootStatus::NoRoots: return "NoRoots";
    case RootStatus::DoubleRootNear: return "DoubleRootNear";
  }
  return "?";
}

cplx G0(double s, double gamma) {
  if (!(s >= 0)) throw DomainError("G0: s must be >= 0");
  if (!(gamma > 0)) throw DomainError("G0: gamma must be > 0");
  return s + principal_sqrt(cplx((s - 1.0) * (s + 1.0), 0.0)) - std::exp(gamma * std::sqrt(s + 1.0));
}

double G0_real(double s, double gamma) {
  return s + std::sqrt((s - 1.0) * (s + 1.0)) - std::exp(gamma * std::sqrt(s + 1.0));
}

double dG0_ds(double s, double gamma) {
  const double r = std::sqrt(s + 1.0);
  return 1.0 + s / std::sqrt((s - 1.0) * (s + 1.0)) - 0.5 * gamma * std::exp(gamma * r) / r;
}

double d2G0_ds2(double s, double gamma) {
  const double r = std::sqrt(s + 1.0);
  return -std::pow((s - 1.0) * (s + 1.0), -1.5) +
         gamma * std::exp(gamma * r) * (1.0 - gamma * r) / (4.0 * r * r * r);
}

G0Max max_G0(double gamma) {
  if (!(gamma > 0)) throw DomainError("max_G0: gamma must be > 0");
  // right end: grow until G0 < -10 and falling for three doublings
  double s_hi = 2.0, prev = G0_real(2.0, gamma);
  for (int falling = 0; falling < 3;) {
    s_hi *= 2.0;
    const double v = G0_real(s_hi, gamma);
    falling = (v < -10.0 && v < prev) ? falling + 1 : 0;
    prev = v;
  }

  // golden section in u = log(s-1); covers maxima hugging s=1 and far out
  auto f = [gamma](double u) { return G0_real(1.0 + std::exp(u), gamma); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -60.0, hi = std::log(s_hi - 1.0);
  double c = hi - invphi * (hi - lo), d = lo + invphi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
  }
  double s = 1.0 + std::exp(0.5 * (lo + hi));
  double best = G0_real(s, gamma);
  for (int it = 0; it < 3; ++it) {
    const double h = d2G0_ds2(s, gamma);
    if (!(h < 0)) break;
    const double sn = s - dG0_ds(s, gamma) / h;
    if (!(sn > 1.0)) break;
    const double vn = G0_real(sn, gamma);
    if (!(vn >= best)) break;
    s = sn;
    best = vn;
  }
  return {s, best, s_hi};
}

namespace {

double bisect_g0(double lo, double hi, double gamma) {
  auto f = [gamma](double p) { return g_zero(p, gamma); };
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits);
  const auto r = boost::math::tools::bisect(f, lo, hi, tol);
  // pick the endpoint with the smaller residual
  return std::abs(f(r.first)) <= std::abs(f(r.second)) ? r.first : r.second;
}

}  // namespace

RootPair find_roots(double gamma) {
  if (!(gamma > 0)) throw DomainError("find_roots: gamma must be > 0");
  RootPair out;
  out.gamma = gamma;
  const G0Max mx = max_G0(gamma);
  const double gs = gamma_star().gamma_star;
  if (std::abs(gamma - gs) <= kFoldGuard * gs) {
    out.status = RootStatus::DoubleRootNear;
    out.p1 = out.p2 = std::sqrt(mx.s);
    return out;
  }
  if (!(mx.value > 0)) {
    out.status = RootStatus::NoRoots;
    out.p1 = out.p2 = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double pm = std::sqrt(mx.s);
  out.p1 = bisect_g0(1.0, pm, gamma);
  out.p2 = bisect_g0(pm, std::sqrt(mx.s_neg), gamma);
  out.status = RootStatus::TwoRoots;
  return out;
}

namespace {

std::optional<cplx> newton_g(cplx z, double gamma, double delta) {
  const cplx z0 = z;
  double prev = HUGE_VAL;
  for (int it = 0; it < 100; ++it) {
    const cplx g = g_delta_complex(z, gamma, delta);
    const cplx dg = g_delta_derivative(z, gamma, delta);
    if (!std::isfinite(std::abs(g)) || dg == cplx(0.0)) return std::nullopt;
    cplx step = g / dg;
    // damp steps that would leave the neighbourhood of the start
    const double cap = 0.25 * std::abs(z0);
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    z -= step;
    if (!(z.real() > 1.0)) return std::nullopt;
    const double s = std::abs(step);
    if (s <= 4e-16 * std::abs(z)) return z;
    // rounding floor: steps stop shrinking
    if (s <= 1e-12 * std::abs(z) && s > 0.5 * prev) return z;
    prev = s;
  }
  return std::nullopt;
}

}  // namespace

std::vector<cplx> g_delta_zeros(const Params& params) {
  const double gamma = params.gamma(), delta = params.delta();
  const RootPair r = find_roots(gamma);
  std::vector<cplx> starts;
  if (r.status == RootStatus::TwoRoots) {
    starts = {r.p1, r.p2};
  } else if (gamma < 1.5 * gamma_star().gamma_star) {
    const double pm = std::sqrt(max_G0(gamma).s);
    for (double re : {-0.1, 0.0, 0.1})
      for (double im : {-0.1, 0.1}) starts.push_back(cplx(pm + re, im));
  }
  std::vector<cplx> out;
  for (cplx s : starts) {
    const auto z = newton_g(s, gamma, delta);
    if (!z) continue;
    bool dup = false;
    for (cplx o : out) dup = dup || std::abs(o - *z) <= 1e-9 * std::abs(*z);
    if (!dup) out.push_back(*z);
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  return out;
}

GammaStarResult compute_gamma_star() {
  double lo = 0.5, hi = 1.5;
  while (hi - lo > 4 * std::numeric_limits<double>::epsilon()) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (max_G0(mid).value > 0 ? lo : hi) = mid;
  }
  GammaStarResult r;
  r.lo = lo;
  r.hi = hi;
  r.gamma_star = 0.5 * (lo + hi);
  r.inner_max_s = max_G0(r.gamma_star).s;
  return r;
}

namespace {
std::once_flag gamma_star_once;
GammaStarResult gamma_star_value;
}  // namespace

const GammaStarResult& gamma_star() {
  std::call_once(gamma_star_once, [] { gamma_star_value = compute_gamma_star(); });
  return gamma_star_value;
}

bool seed_gamma_star(const GammaStarResult& r) {
  bool used = false;
  std::call_once(gamma_star_once, [&] {
    gamma_star_value = r;
    used = true;
  });
  return used;
}

double lambda_gamma(const Params& params) {
  const RootPair rp = find_roots(params.gamma());
  if (rp.status == RootStatus::NoRoots)
    throw RootStatusError(RootStatus::NoRoots, "lambda_gamma: g0 has no real roots above gamma*");
  return 2.0 * std::numbers::pi / (params.k0() * rp.p2);
}

namespace constants {

double sqrt_e_threshold() { return std::sqrt(std::numbers::e) / (std::numbers::e + 1.0); }

double concavity_threshold() { return 1.0 / std::numbers::sqrt2; }

double concavity_closed_form() {
  const double e = std::numbers::e;
  return std::pow(e * e + 1.0, 1.5) * (e - std::sqrt(2.0 * e) + 1.0) / ((e + 1.0) * (e + 1.0));
}

double concavity_numeric_max() {
  const double e = std::numbers::e;
  auto h = [e](double g) {
    const double t = std::max(1.0 / (g * g) - 2.0, 0.0);
    return e * g * std::pow(t, 1.5) * (1.0 - std::numbers::sqrt2 * g);
  };
  const double lo = sqrt_e_threshold(), hi = concavity_threshold();
  const int n = 20000;
  double best = h(lo);
  int ib = 0;
  for (int i = 1; i <= n; ++i) {
    const double v = h(lo + (hi - lo) * i / n);
    if (v > best) best = v, ib = i;
  }
  // refine around the best grid node
  double a = lo + (hi - lo) * std::max(ib - 1, 0) / n;
  double b = lo + (hi - lo) * std::min(ib + 1, n) / n;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    (h(m1) < h(m2) ? a : b) = (h(m1) < h(m2) ? m1 : m2);
  }
  return std::max(best, h(0.5 * (a + b)));
}

double dG2_ds_at_threshold() {
  const double g = sqrt_e_threshold();
  return 0.5 * g * std::exp(g * std::numbers::sqrt2) / std::numbers::sqrt2;
}

double shell_sum_bound(double delta) {
  return (std::pow(4.0 + delta * delta, 0.25) + std::sqrt(1.0 + delta * delta)) *
         std::exp(-gamma_star().gamma_star);
}

double G0_interval_bound() {
  const double e = std::numbers::e;
  return 1.0 - e / (e + 1.0) + std::sqrt(1.0 - 2.0 * e / ((e + 1.0) * (e + 1.0)));
}

}  // namespace constants

std::vector<ConjectureSample> conjecture_scan(const std::vector<double>& deltas,
                                              const std::vector<double>& gammas) {
  std::vector<ConjectureSample> out;
  for (double g : gammas) {
    const RootPair rp = find_roots(g);
    if (rp.status != RootStatus::TwoRoots)
      throw RootStatusError(rp.status, std::string("conjecture_scan: ") + root_status_name(rp.status) +
                                           " at gamma=" + std::to_string(g));
    for (double d : deltas) {
      const Params pr = Params::from_gamma(g, d);
      for (int j = 1; j <= 2; ++j) {
        const double p = j == 1 ? rp.p1 : rp.p2;
        ConjectureSample cs;
        cs.delta = d;
        cs.gamma = g;
        cs.root_index = j;
        cs.p_root = p;
        cs.g_ratio = std::abs(g_delta(p, pr)) / d;
        cs.m_value = m_factor(p, pr, pr.a());
        out.push_back(cs);
      }
    }
  }
  return out;
}

// bounds audit ---------------------------------------------------------------

long BoundsReport::total_violations() const {
  long n = 0;
  for (const auto& c : checks) n += c.violations;
  return n;
}

namespace {

struct Plain {
  double sp, sm, sum, diff;  // sqrt(p^2+1), sqrt(p^2-1), and their sum / difference
};

Plain plain(double p) {
  const double sp = std::sqrt(p * p + 1.0);
  const double sm = std::sqrt((p - 1.0) * (p + 1.0));
  return {sp, sm, sp + sm, 2.0 / (sp + sm)};
}

double large_p_rhs_term(double p, double gamma) {
  const Plain q = plain(p);
  return (0.5 + 3.0 * std::sqrt(0.4)) * q.sum * q.sum * std::exp(-2.0 * gamma * q.sp);
}

double large_p_rhs(double p, double gamma) {
  const Plain q = plain(p);
  return 0.5 * q.diff * q.diff - large_p_rhs_term(p, gamma);
}

// sup over p >= 1 of 2 S0 e^{-gamma* sqrt(p^2+1)} / D0
double reflection_constant() {
  const double gs = gamma_star().gamma_star;
  double c = 1.0;
  for (double p = 1.0; p < 60.0; p += 1e-3) {
    const Plain q = plain(p);
    c = std::max(c, 2.0 * q.sum * std::exp(-gs * q.sp) / q.diff);
  }
  return c;
}

struct Tally {
  explicit Tally(const char* name) { c.name = name; }
  BoundsCheck c;
  void add(double ratio, double p, double d, double g) {
    ++c.samples;
    if (ratio > c.max_ratio) c.max_ratio = ratio;
    if (ratio > 1.0) {
      ++c.violations;
      if (!c.witness) c.witness = BoundsWitness{p, d, g};
    }
  }
};

}  // namespace

double large_p_margin(double p, double gamma) { return large_p_rhs(p, gamma); }

double delta_gamma(double gamma) {
  const double gs = gamma_star().gamma_star;
  if (!(gamma > gs)) throw DomainError("delta_gamma: needs gamma > gamma*");
  // p~: past the last non-positive point of the large-p right-hand side;
  // the subtracted term is decreasing for p > 2/gamma, so stop once there and positive
  const double h = 1e-3;
  double p_tilde = 1.0;
  for (double p = 1.0;; p += h) {
    if (large_p_rhs(p, gamma) <= 0) p_tilde = p + h;
    if (p > 2.0 / gamma + 1.0 && large_p_rhs(p, gamma) > 0) break;
  }
  double m = std::numeric_limits<double>::infinity(), M = 0.0;
  for (double p = 1.0; p <= p_tilde + 0.5 * h; p += h) {
    const Plain q = plain(p);
    m = std::min(m, 0.5 * std::abs(g_zero(p, gamma)));
    M = std::max(M, 3.0 * q.sum * q.sum * std::exp(-2.0 * gamma * q.sp));
  }
  return std::min(0.4, (m / M) * (m / M));
}

BoundsReport bounds_audit(long n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw DomainError("bounds_audit: n_samples must be >= 1");
  const double gs = gamma_star().gamma_star;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * U(rng));
  };

  Tally a("a_lower_bound"), b("b_upper_bound"), gl("g_lower_bound"), mb("M_bound"),
      lp("large_p_int_positive");
  const double c_r = reflection_constant();
  double c2_factor = 1.0;
  for (double p = 1.0; p < 60.0; p += 1e-3) {
    const Plain q = plain(p);
    c2_factor = std::max(c2_factor, 4.0 * q.sum * q.sum * std::exp(-2.0 * gs * q.sp) / (q.diff * q.diff));
  }

  for (long i = 0; i < n_samples; ++i) {
    // a: |D|^2 >= 1 (p<=1), >= (sp-sm)^2 (p>=1); any delta in (0,1)
    {
      const double p = 10.0 * U(rng), d = log_uniform(1e-12, 0.999);
      const auto n = nus(p, Params(1.0, 1.0, d));
      const double lhs = std::norm(diff_sum(p, n.nu_m, n.nu_s, d).diff);
      const double bound = p <= 1 ? 1.0 : std::pow(plain(p).diff, 2);
      a.add(bound / lhs * (1 - 1e-13), p, d, 0.0);
    }
    // b: |S|^2 e^{-2 gamma sigma'}; gamma > gamma*
    {
      const double g = gs * (1.0 + 3.0 * U(rng)) + 1e-9;
      const bool small = U(rng) < 0.5;
      const double p = small ? U(rng) : 1.0 + 9.0 * U(rng);
      const double d = small ? log_uniform(1e-12, 0.4) : log_uniform(1e-12, 0.999);
      const auto n = nus(p, Params(1.0, 1.0, d));
      const double lhs = std::norm(diff_sum(p, n.nu_m, n.nu_s, d).sum) * std::exp(-2.0 * g * n.nu_s.real());
      double bound = 0.99;
      if (!small) {
        const Plain q = plain(p);
        bound = (1.0 + 3.0 * std::sqrt(d)) * q.sum * q.sum * std::exp(-2.0 * g * q.sp);
      }
      b.add(lhs / bound, p, d, g);
    }
    // g lower bound and M envelope; gamma in [1.05, 4] gamma*, delta <= delta_gamma
    {
      const double g = gs * (1.05 + 2.95 * U(rng));
      const double dg = delta_gamma(g);
      const double d = log_uniform(std::min(1e-12, dg), dg);
      const double p = 10.0 * U(rng);
      const double gd = std::abs(g_delta(p, g, d));
      const double bound = p <= 1 ? 0.01 : 0.5 * std::abs(g_zero(p, g));
      gl.add(bound / gd, p, d, g);

      const double c1 = 0.5 * (1.0 - std::exp(-2.0 * g));
      const double c3 = c_r * g * std::exp(-g);
      const double c_gamma = (1.0 + dg * dg) / std::numbers::pi * (c1 + c1 * c2_factor + 2.0 * c3) * 1.01;
      const double p2 = p * p;
      const double env = std::pow(std::pow((p2 + 1) * (p2 + 1) + 1, 0.25) +
                                      std::numbers::sqrt2 * std::sqrt(std::abs(p2 - 1)), 2) *
                         (std::sqrt((p2 + 1) * (p2 + 1) + 1) + p2);
      const Params pr = Params::from_gamma(g, d);
      mb.add(std::abs(m_factor(p, pr, pr.a())) / (c_gamma * env), p, d, g);
    }
    // large-p right-hand side positive at 1.5 gamma*, 2 gamma*
    {
      const double g = (i % 2 ? 2.0 : 1.5) * gs;
      const double p = 1.0 + 9.0 * U(rng);
      const Plain q = plain(p);
      lp.add(large_p_rhs_term(p, g) / (0.5 * q.diff * q.diff), p, 0.4, g);
    }
  }
  return {{a.c, b.c, gl.c, mb.c, lp.c}};
}

}  // namespace slab
