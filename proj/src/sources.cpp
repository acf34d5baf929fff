#include "slablens/sources.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "slablens/dispersion.hpp"
#include "slablens/numeric.hpp"
#include "slablens/quadrature.hpp"

namespace slab {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// X(s) = sum coef[j] u^j, u = (s - c) / h, on [s0, s1]
struct Piece {
  double s0 = 0, s1 = 0, c = 0, h = 1;
  int deg = 0;
  std::array<double, 7> coef{};

  double eval_u(double u, int der = 0) const {
    double acc = 0.0;
    for (int j = deg; j >= der; --j) {
      double f = 1.0;
      for (int i = 0; i < der; ++i) f *= j - i;
      acc = acc * u + f * coef[j];
    }
    return acc;
  }
};

struct Term {
  std::array<Piece, 2> pieces;
  int n = 0;
  cplx Q;
};

struct Separable {
  std::array<Term, 2> terms;
  int n = 0;
};

// C u^3 (|u| - 1)^3 split at u = 0, scaled by h^-der
void bump_pieces(Term& t, double d0, double d1, double C, int der) {
  const double c = 0.5 * (d0 + d1), h = 0.5 * (d1 - d0);
  const std::array<double, 7> left{0, 0, 0, -1, -3, -3, -1}, right{0, 0, 0, -1, 3, -3, 1};
  const double scale = C / std::pow(h, der);
  for (int side = 0; side < 2; ++side) {
    Piece& p = t.pieces[side];
    p.s0 = side == 0 ? d0 : c;
    p.s1 = side == 0 ? c : d1;
    p.c = c;
    p.h = h;
    const auto& src = side == 0 ? left : right;
    p.deg = 6 - der;
    p.coef.fill(0.0);
    for (int j = der; j <= 6; ++j) {
      double f = 1.0;
      for (int i = 0; i < der; ++i) f *= j - i;
      p.coef[j - der] = scale * f * src[j];
    }
  }
  t.n = 2;
}

void box_piece(Term& t, double d0, double d1) {
  Piece& p = t.pieces[0];
  p.s0 = d0;
  p.s1 = d1;
  p.c = d0;
  p.h = 1.0;
  p.deg = 0;
  p.coef.fill(0.0);
  p.coef[0] = 1.0;
  t.n = 1;
}

// value = m * exp(e)
struct Anchored {
  cplx m{0.0}, e{0.0};
};

const auto& gl30() {
  using G = boost::math::quadrature::gauss<double, 30>;
  static const auto nodes = [] {
    std::vector<std::pair<double, double>> r;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.emplace_back(x[i], w[i]);
      if (x[i] != 0.0) r.emplace_back(-x[i], w[i]);
    }
    return r;
  }();
  return nodes;
}

// int_{ua}^{ub} P(u) e^{mu u} du.  Gauss-Legendre while the exponential is
// resolved, otherwise the terminating integration-by-parts sum (exact for
// polynomials, no cancellation once |mu| (ub - ua) is large).
Anchored poly_exp_moment(const Piece& P, double ua, double ub, cplx mu) {
  if (!(ub > ua)) return {};
  const double ustar = mu.real() * ub >= mu.real() * ua ? ub : ua;
  Anchored r;
  r.e = mu * ustar;
  const double w = ub - ua;
  if (std::abs(mu) * w <= 4.0) {
    const double hm = 0.5 * w, mid = 0.5 * (ua + ub);
    cplx acc = 0.0;
    for (const auto& [x, wt] : gl30()) {
      const double u = mid + hm * x;
      acc += wt * P.eval_u(u) * std::exp(mu * (u - ustar));
    }
    r.m = hm * acc;
    return r;
  }
  auto S = [&](double u) {
    cplx acc = 0.0, den = mu;
    double sgn = 1.0;
    for (int j = 0; j <= P.deg; ++j) {
      acc += sgn * P.eval_u(u, j) / den;
      den *= mu;
      sgn = -sgn;
    }
    return acc;
  };
  r.m = std::exp(mu * (ub - ustar)) * S(ub) - std::exp(mu * (ua - ustar)) * S(ua);
  return r;
}

// int over [sa, sb] of X(s) e^{lambda s}
ScaledComplex piece_moment(const Piece& P, double sa, double sb, cplx lambda) {
  const double lo = std::max(sa, P.s0), hi = std::min(sb, P.s1);
  if (!(hi > lo)) return {};
  const Anchored a = poly_exp_moment(P, (lo - P.c) / P.h, (hi - P.c) / P.h, lambda * P.h);
  if (a.m == cplx(0.0)) return {};
  return ScaledComplex::exp(lambda * P.c + a.e) * (P.h * a.m);
}

cplx bump_y_hat(const Bump& b, double q) {
  Term t;
  bump_pieces(t, -1.0, 1.0, 1.0, 0);
  const double ym = 0.5 * (b.h0 + b.h1), hy = 0.5 * (b.h1 - b.h0);
  const cplx mu(0.0, -q * hy);
  cplx acc = 0.0;
  for (int i = 0; i < t.n; ++i) {
    const Piece& P = t.pieces[i];
    const Anchored a = poly_exp_moment(P, P.s0, P.s1, mu);
    acc += a.m * std::exp(a.e);
  }
  return hy * std::polar(1.0, -q * ym) * acc;
}

double sinc_hat_t2(const Current& c, double q) {
  const double s1 = sinc(c.alpha1 * q), s2 = sinc(c.alpha2 * q);
  return s1 * s1 * s1 * s2 * s2;
}

Separable separable(const SourceSpec& src, double q) {
  Separable s;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Bump>) {
          bump_pieces(s.terms[0], k.d0, k.d1, k.C, 0);
          s.terms[0].Q = bump_y_hat(k, q);
          s.n = 1;
        } else if constexpr (std::is_same_v<T, SincBust>) {
          box_piece(s.terms[0], k.d0, k.d1);
          s.terms[0].Q = -kI * sinc(k.alpha1 * q) * std::sin(k.alpha2 * q);
          s.n = 1;
        } else if constexpr (std::is_same_v<T, BesselBust>) {
          box_piece(s.terms[0], k.d0, k.d1);
          s.terms[0].Q = kI * detail::bessel_j0(k.beta0 * q) * detail::bessel_j1(k.beta1 * q);
          s.n = 1;
        } else if constexpr (std::is_same_v<T, Current>) {
          const double t2 = sinc_hat_t2(k, q);
          bump_pieces(s.terms[0], k.d0, k.d1, -k.C, 2);
          s.terms[0].Q = t2;
          bump_pieces(s.terms[1], k.d0, k.d1, k.C, 0);
          s.terms[1].Q = q * q * t2;
          s.n = 2;
        } else {
          throw UnsupportedSource("dipole has no pointwise transform");
        }
      },
      src.kind());
  return s;
}

double eval_x(const Term& t, double x) {
  for (int i = 0; i < t.n; ++i) {
    const Piece& P = t.pieces[i];
    if (x >= P.s0 && x <= P.s1) return P.eval_u((x - P.c) / P.h);
  }
  return 0.0;
}

ScaledComplex term_moment(const Separable& s, double sa, double sb, cplx lambda) {
  ScaledComplex acc;
  for (int k = 0; k < s.n; ++k) {
    const Term& t = s.terms[k];
    if (t.Q == cplx(0.0)) continue;
    ScaledComplex part;
    for (int i = 0; i < t.n; ++i) part = part + piece_moment(t.pieces[i], sa, sb, lambda);
    acc = acc + part * t.Q;
  }
  return acc;
}

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

void validate_support(double d0, double d1, double a) {
  require(std::isfinite(d0) && std::isfinite(d1), "source support must be finite");
  require(d0 > a, "source support must lie right of the slab (d0 > a)");
  require(d1 > d0, "source support needs d1 > d0");
}

RootPair busting_roots(const Params& params) {
  const RootPair r = find_roots(params.gamma());
  if (r.status != RootStatus::TwoRoots)
    throw RootStatusError(r.status, "busting sources need two real roots of g0 at this gamma");
  return r;
}

double bump_profile(double u) {
  if (u < -1.0 || u > 1.0) return 0.0;
  const double v = std::abs(u) - 1.0;
  return u * u * u * v * v * v;
}

Piece unit_bump_piece(int side, int der) {
  Term t;
  bump_pieces(t, -1.0, 1.0, 1.0, der);
  return t.pieces[side];
}

// r1 and derivatives for the current (same shape as the bump x-profile)
double r1(const Current& c, double x, int der) {
  if (x < c.d0 || x > c.d1) return 0.0;
  const double m = 0.5 * (c.d0 + c.d1), h = 0.5 * (c.d1 - c.d0);
  const double u = (x - m) / h;
  return c.C * unit_bump_piece(u < 0.0 ? 0 : 1, 0).eval_u(u, der) / std::pow(h, der);
}

std::vector<double> current_widths(const Current& c) {
  return {c.alpha1, c.alpha1, c.alpha1, c.alpha2, c.alpha2};
}

double bessel_density_y(const BesselBust& b, double y) {
  if (std::abs(y) >= b.beta0 + b.beta1) return 0.0;
  // t = beta0 sin(th) absorbs the f0 singularity; f1 keeps one where
  // y - beta0 sin(th) = +-beta1.  tag +1: beta1 - u vanishes, -1: beta1 + u.
  struct Cut {
    double th;
    int tag;
  };
  std::vector<Cut> cuts{{-kPi / 2, 0}, {kPi / 2, 0}};
  if (std::abs(y - b.beta1) < b.beta0) cuts.push_back({std::asin((y - b.beta1) / b.beta0), +1});
  if (std::abs(y + b.beta1) < b.beta0) cuts.push_back({std::asin((y + b.beta1) / b.beta0), -1});
  std::sort(cuts.begin(), cuts.end(), [](const Cut& l, const Cut& r) { return l.th < r.th; });
  QuadConfig cfg;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-13;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Cut lo = cuts[i], hi = cuts[i + 1];
    const double L = hi.th - lo.th;
    if (!(L > 0.0)) continue;
    if (std::abs(y - b.beta0 * std::sin(lo.th + 0.5 * L)) >= b.beta1) continue;
    // th = lo + L sin^2(t/2): both end singularities become smooth
    auto f = [&](double t) {
      const double dl = L * std::pow(std::sin(0.5 * t), 2), dh = -L * std::pow(std::cos(0.5 * t), 2);
      const double th = lo.th + dl;
      // sin(th) - sin(c) = 2 cos((th + c)/2) sin((th - c)/2), exact offsets near the cuts
      auto diff_to = [&](double off) { return 2.0 * std::cos(th - 0.5 * off) * std::sin(0.5 * off); };
      const double u = y - b.beta0 * std::sin(th);
      double minus = b.beta1 - u, plus = b.beta1 + u;
      if (lo.tag == 1) minus = b.beta0 * diff_to(dl);
      if (hi.tag == 1) minus = b.beta0 * diff_to(dh);
      if (lo.tag == -1) plus = -b.beta0 * diff_to(dl);
      if (hi.tag == -1) plus = -b.beta0 * diff_to(dh);
      const double r = minus * plus;
      if (!(r > 0.0)) return 0.0;
      return -u / (b.beta1 * kPi * kPi * std::sqrt(r)) * 0.5 * L * std::sin(t);
    };
    acc += adapt_real(f, {Panel::linear(0.0, 0.5 * kPi), Panel::linear(0.5 * kPi, kPi)}, cfg, nullptr,
                      "bessel density");
  }
  return acc;
}

}  // namespace

// -- SourceSpec --------------------------------------------------------------

SourceSpec::SourceSpec(SourceKind kind, double a) : kind_(std::move(kind)) {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Dipole>) {
          require(std::isfinite(k.x0) && k.x0 > a, "dipole must sit right of the slab (x0 > a)");
          require(std::isfinite(k.y0) && std::isfinite(k.dx) && std::isfinite(k.dy), "dipole fields must be finite");
        } else {
          validate_support(k.d0, k.d1, a);
          if constexpr (std::is_same_v<T, Bump>) {
            require(std::isfinite(k.C), "bump amplitude must be finite");
            require(k.h1 > k.h0, "bump needs h1 > h0");
          } else if constexpr (std::is_same_v<T, BesselBust>) {
            require(k.beta0 > 0 && k.beta1 > 0, "bessel-bust widths must be positive");
          } else {
            require(k.alpha1 > 0 && k.alpha2 > 0, "busting widths must be positive");
          }
        }
      },
      kind_);
}

SourceSpec SourceSpec::dipole(double x0, double dx, double dy, double y0, double a) {
  return SourceSpec(Dipole{x0, y0, dx, dy}, a);
}

SourceSpec SourceSpec::bump(double d0, double d1, double C, double h0, double h1, double a) {
  return SourceSpec(Bump{C, d0, d1, h0, h1}, a);
}

SourceSpec SourceSpec::sinc_bust(const Params& params, double d0, double d1) {
  const RootPair r = busting_roots(params);
  const double k = params.k0();
  return SourceSpec(SincBust{d0, d1, kPi / (k * r.p1), kPi / (k * r.p2)}, params.a());
}

SourceSpec SourceSpec::bessel_bust(const Params& params, double d0, double d1) {
  const RootPair r = busting_roots(params);
  const double k = params.k0();
  return SourceSpec(BesselBust{d0, d1, kJ0Zero1 / (k * r.p1), kJ1Zero1 / (k * r.p2)}, params.a());
}

SourceSpec SourceSpec::current(const Params& params, double d0, double d1, double C) {
  const RootPair r = busting_roots(params);
  const double k = params.k0();
  return SourceSpec(Current{C, d0, d1, kPi / (k * r.p1), kPi / (k * r.p2)}, params.a());
}

std::string SourceSpec::name() const {
  static const char* names[] = {"dipole", "bump", "sinc-bust", "bessel-bust", "current"};
  return names[kind_.index()];
}

double SourceSpec::d0() const {
  return std::visit(
      [](const auto& k) {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Dipole>) return k.x0;
        else return k.d0;
      },
      kind_);
}

double SourceSpec::d1() const {
  return std::visit(
      [](const auto& k) {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, Dipole>) return k.x0;
        else return k.d1;
      },
      kind_);
}

// -- transforms and moments --------------------------------------------------

cplx f_hat(const SourceSpec& s, double x, double q) {
  if (x < s.d0() || x > s.d1()) {
    if (s.is_dipole()) throw UnsupportedSource("dipole has no pointwise transform");
    return 0.0;
  }
  const Separable sep = separable(s, q);
  cplx acc = 0.0;
  for (int k = 0; k < sep.n; ++k) acc += eval_x(sep.terms[k], x) * sep.terms[k].Q;
  return acc;
}

DipoleTransform dipole_f_hat(const SourceSpec& s, double q) {
  const auto* d = std::get_if<Dipole>(&s.kind());
  if (!d) throw UnsupportedSource("dipole_f_hat needs a dipole");
  const cplx ph = std::polar(1.0, -q * d->y0);
  return {d->x0, kI * d->dy * q * ph, d->dx * ph};
}

ScaledComplex I_scaled(const SourceSpec& s, double p, const Params& params) {
  require(std::isfinite(p), "I_scaled needs a finite p");
  const double k = params.k0(), q = k * p;
  const cplx nu = nus(std::abs(p), params).nu_m;
  if (const auto* d = std::get_if<Dipole>(&s.kind())) {
    const cplx w = d->dx * k * nu + kI * d->dy * q;
    return ScaledComplex::exp(-k * nu * d->x0 - kI * q * d->y0) * w;
  }
  return term_moment(separable(s, q), s.d0(), s.d1(), -k * nu);
}

MomentIntegrals moments(const SourceSpec& s, double x, double q, const Params& params) {
  require(x >= params.a(), "moments need x >= a");
  const double k = params.k0();
  const cplx nu = nus(std::abs(q) / k, params).nu_m;
  MomentIntegrals r;
  if (const auto* d = std::get_if<Dipole>(&s.kind())) {
    const cplx ph = std::polar(1.0, -q * d->y0);
    const ScaledComplex full = ScaledComplex::exp(-k * nu * d->x0) * ((d->dx * k * nu + kI * d->dy * q) * ph);
    if (x > d->x0) {
      r.minus = full;
      r.plus = ScaledComplex::exp(k * nu * d->x0) * ((-d->dx * k * nu + kI * d->dy * q) * ph);
    } else {
      r.rest = full;
    }
    return r;
  }
  const Separable sep = separable(s, q);
  const double split = std::clamp(x, s.d0(), s.d1());
  r.minus = term_moment(sep, s.d0(), split, -k * nu);
  r.plus = term_moment(sep, s.d0(), split, k * nu);
  r.rest = term_moment(sep, split, s.d1(), -k * nu);
  return r;
}

DegenerateMoments degenerate_moments(const SourceSpec& s, double x, double q, double a) {
  DegenerateMoments r;
  if (const auto* d = std::get_if<Dipole>(&s.kind())) {
    const DipoleTransform t = dipole_f_hat(s, q);
    // int (w0 delta + w1 delta') g = w0 g(x0) - w1 g'(x0), g = min(x, s) - a
    r.total = t.w_delta;
    r.green = x > d->x0 ? t.w_delta * (d->x0 - a) - t.w_delta_prime : t.w_delta * (x - a);
    return r;
  }
  const Separable sep = separable(s, q);
  for (int k = 0; k < sep.n; ++k) {
    const Term& t = sep.terms[k];
    double tot = 0.0, green = 0.0;
    for (int i = 0; i < t.n; ++i) {
      const Piece& P = t.pieces[i];
      for (const auto& [lo, hi] : {std::pair{P.s0, std::min(P.s1, x)}, std::pair{std::max(P.s0, x), P.s1}}) {
        if (!(hi > lo)) continue;
        double acc0 = 0.0, acc1 = 0.0;
        for (const auto& [z, w] : gl30()) {
          const double sv = 0.5 * (lo + hi) + 0.5 * (hi - lo) * z;
          const double v = w * P.eval_u((sv - P.c) / P.h);
          acc0 += v;
          acc1 += v * (std::min(x, sv) - a);
        }
        tot += 0.5 * (hi - lo) * acc0;
        green += 0.5 * (hi - lo) * acc1;
      }
    }
    r.total += tot * t.Q;
    r.green += green * t.Q;
  }
  return r;
}

// -- real space --------------------------------------------------------------

double spatial_density(const SourceSpec& s, double x, double y) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Dipole>) {
          throw UnsupportedSource("dipole density is distributional");
        } else {
          if (x < k.d0 || x > k.d1) return 0.0;
          if constexpr (std::is_same_v<T, Bump>) {
            const double u = 2.0 * (x - k.d0) / (k.d1 - k.d0) - 1.0;
            const double v = 2.0 * (y - k.h0) / (k.h1 - k.h0) - 1.0;
            return k.C * bump_profile(u) * bump_profile(v);
          } else if constexpr (std::is_same_v<T, SincBust>) {
            const double a1 = k.alpha1, a2 = k.alpha2;
            const auto H = [](double z) { return z > 0.0 ? 1.0 : 0.0; };
            return (H(-y - a1 - a2) - H(-y - a1 + a2) + H(-y + a1 + a2) - H(-y - a2 + a1)) / (4.0 * a1);
          } else if constexpr (std::is_same_v<T, BesselBust>) {
            return bessel_density_y(k, y);
          } else {
            const auto w = current_widths(k);
            return -r1(k, x, 2) * detail::box_spline(w, y, 0) - r1(k, x, 0) * detail::box_spline(w, y, 2);
          }
        }
      },
      s.kind());
}

std::pair<double, double> current_components(const SourceSpec& s, double x, double y) {
  const auto* c = std::get_if<Current>(&s.kind());
  if (!c) throw UnsupportedSource("current_components needs a current source");
  if (x < c->d0 || x > c->d1) return {0.0, 0.0};
  const auto w = current_widths(*c);
  return {r1(*c, x, 0) * detail::box_spline(w, y, 1), -r1(*c, x, 1) * detail::box_spline(w, y, 0)};
}

double norm_l2(const SourceSpec& s) {
  // int of a product of polynomial pieces, exact with GL30
  auto gl = [](double lo, double hi, auto&& f) {
    double acc = 0.0;
    for (const auto& [x, w] : gl30()) acc += w * f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
    return 0.5 * (hi - lo) * acc;
  };
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Dipole>) {
          return std::numeric_limits<double>::quiet_NaN();
        } else if constexpr (std::is_same_v<T, Bump>) {
          auto sq = [](double u) { return std::pow(bump_profile(u), 2); };
          const double unit = gl(-1, 0, sq) + gl(0, 1, sq);
          return std::abs(k.C) * std::sqrt(unit * 0.5 * (k.d1 - k.d0) * unit * 0.5 * (k.h1 - k.h0));
        } else if constexpr (std::is_same_v<T, SincBust>) {
          return std::sqrt((k.d1 - k.d0) * 4.0 * k.alpha2 / (16.0 * k.alpha1 * k.alpha1));
        } else if constexpr (std::is_same_v<T, BesselBust>) {
          // Plancherel on q; the J0^2 J1^2 tail ~ 1 / (pi^2 b0 b1 q^2) on average
          const double Q = 4000.0 / std::min(k.beta0, k.beta1);
          std::vector<Panel> panels;
          const double step = kPi / std::max(k.beta0, k.beta1);
          for (double t = 0.0; t < Q; t += step) panels.push_back(Panel::linear(t, std::min(t + step, Q)));
          QuadConfig cfg;
          cfg.abs_tol = 1e-14;
          cfg.max_panels = 40000;
          const double body = adapt_real(
              [&](double q) {
                const double v = detail::bessel_j0(k.beta0 * q) * detail::bessel_j1(k.beta1 * q);
                return v * v;
              },
              panels, cfg, nullptr, "norm_l2");
          const double tail = 1.0 / (kPi * kPi * k.beta0 * k.beta1 * Q);
          return std::sqrt((k.d1 - k.d0) * (body + tail) / kPi);
        } else {
          const auto w = current_widths(k);
          std::vector<double> br{k.d0, 0.5 * (k.d0 + k.d1), k.d1};
          double A = 0, B = 0, C = 0;
          for (int i = 0; i < 2; ++i) {
            A += gl(br[i], br[i + 1], [&](double x) { return std::pow(r1(k, x, 2), 2); });
            B += gl(br[i], br[i + 1], [&](double x) { return r1(k, x, 0) * r1(k, x, 2); });
            C += gl(br[i], br[i + 1], [&](double x) { return std::pow(r1(k, x, 0), 2); });
          }
          std::vector<double> knots;
          for (int mask = 0; mask < 32; ++mask) {
            double z = 0.0;
            for (int i = 0; i < 5; ++i) z += (mask >> i & 1) ? w[i] : -w[i];
            knots.push_back(z);
          }
          std::sort(knots.begin(), knots.end());
          double T0 = 0, T1 = 0, T2 = 0;
          for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            if (!(knots[i + 1] > knots[i])) continue;
            T0 += gl(knots[i], knots[i + 1], [&](double y) { return std::pow(detail::box_spline(w, y, 0), 2); });
            T1 += gl(knots[i], knots[i + 1],
                     [&](double y) { return detail::box_spline(w, y, 0) * detail::box_spline(w, y, 2); });
            T2 += gl(knots[i], knots[i + 1], [&](double y) { return std::pow(detail::box_spline(w, y, 2), 2); });
          }
          return std::sqrt(A * T0 + 2.0 * B * T1 + C * T2);
        }
      },
      s.kind());
}

namespace detail {

double bessel_j0(double x) { return ::j0(x); }
double bessel_j1(double x) { return ::j1(x); }

double box_spline(const std::vector<double>& hw, double y, int m) {
  const int n = static_cast<int>(hw.size());
  const int pw = n - 1 - m;
  if (pw < 0) throw DomainError("box_spline derivative order too high");
  long double span = 0.0L, norm = 1.0L;
  for (double w : hw) {
    span += w;
    norm *= 2.0L * w;
  }
  if (std::abs(y) >= span) return 0.0;
  // evaluate on the left half, fewer active terms; f^(m)(-y) = (-1)^m f^(m)(y)
  const double sign = (y > 0.0 && (m & 1)) ? -1.0 : 1.0;
  const long double z = -std::abs(y);
  long double acc = 0.0L;
  for (int mask = 0; mask < (1 << n); ++mask) {
    long double t = z;
    int par = 0;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        t += hw[i];
      } else {
        t -= hw[i];
        par ^= 1;
      }
    }
    if (t <= 0.0L) continue;
    long double v = 1.0L;
    for (int i = 0; i < pw; ++i) v *= t;
    acc += par ? -v : v;
  }
  long double fact = 1.0L;
  for (int i = 2; i <= pw; ++i) fact *= i;
  return sign * static_cast<double>(acc / (fact * norm));
}

}  // namespace detail

}  // namespace slab
