// Vector-valued adaptive Gauss-Kronrod over a partition with optional
// square-root end maps.  All outputs of a call share one partition, which
// is what keeps finite differences across a batch of outputs consistent.
#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace slab {

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  int max_panels = 6000;
  bool operator==(const QuadConfig&) const = default;
};

struct QuadratureError : std::runtime_error {
  double a, b, err, tol;
  QuadratureError(double a_, double b_, double e, double t, const std::string& where)
      : std::runtime_error(where + ": quadrature did not converge on panel [" + std::to_string(a_) + ", " +
                           std::to_string(b_) + "], err " + std::to_string(e) + " vs tol " + std::to_string(t)),
        a(a_), b(b_), err(e), tol(t) {}
};

enum class PanelMap { Linear, SqrtLeft, SqrtRight };

//! Integration variable t in [t0, t1]; p(t) = t (Linear), c + L t^2 (SqrtLeft), c - L t^2 (SqrtRight).
struct Panel {
  PanelMap map = PanelMap::Linear;
  double c = 0.0, L = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double err = 0.0;

  double p_of(double t) const {
    switch (map) {
      case PanelMap::Linear: return t;
      case PanelMap::SqrtLeft: return c + L * t * t;
      case PanelMap::SqrtRight: return c - L * t * t;
    }
    return t;
  }
  double jac(double t) const { return map == PanelMap::Linear ? 1.0 : 2.0 * L * t; }
  double pa() const { return std::min(p_of(t0), p_of(t1)); }
  double pb() const { return std::max(p_of(t0), p_of(t1)); }

  static Panel linear(double a, double b) { return {PanelMap::Linear, 0, 0, a, b, 0}; }
  //! [a, b] with a square-root singularity at a (left) or b (right).
  static Panel sqrt_left(double a, double b) { return {PanelMap::SqrtLeft, a, b - a, 0, 1, 0}; }
  static Panel sqrt_right(double a, double b) { return {PanelMap::SqrtRight, b, b - a, 0, 1, 0}; }
};

struct GKRule {
  std::vector<double> x, wk, wg;  // on [-1, 1]; wg is zero at Kronrod-only nodes
};

template <unsigned N>
const GKRule& gk_rule() {
  static const GKRule rule = [] {
    using K = boost::math::quadrature::gauss_kronrod<double, N>;
    using G = boost::math::quadrature::gauss<double, (N - 1) / 2>;
    GKRule r;
    const auto& ax = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const bool odd_gauss = ((N - 1) / 2) & 1;
    r.x.push_back(0.0);
    r.wk.push_back(wk[0]);
    r.wg.push_back(odd_gauss ? wg[0] : 0.0);
    for (unsigned i = 1; i < ax.size(); ++i) {
      const bool is_gauss = odd_gauss ? (i % 2 == 0) : (i % 2 == 1);
      const double g = is_gauss ? wg[i / 2] : 0.0;
      for (double s : {1.0, -1.0}) {
        r.x.push_back(s * ax[i]);
        r.wk.push_back(wk[i]);
        r.wg.push_back(g);
      }
    }
    return r;
  }();
  return rule;
}

//! Visit the (p, weight) nodes of a panel under a rule; weight includes the map Jacobian.
template <class V>
void for_each_node(const Panel& pn, const GKRule& rule, V&& visit) {
  const double h = 0.5 * (pn.t1 - pn.t0), m = 0.5 * (pn.t1 + pn.t0);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double t = m + h * rule.x[i];
    visit(pn.p_of(t), h * pn.jac(t) * rule.wk[i], h * pn.jac(t) * rule.wg[i]);
  }
}

struct AdaptResult {
  std::vector<std::complex<double>> value;
  double err = 0.0;
  double tol = 0.0;
  std::vector<Panel> panels;
  long evaluations = 0;
  double rounding_err = 0.0;  //!< part of err from panels frozen at the rounding floor of p
};

/*!
 * f(p, out) fills out[0..n) with integrand values at p.  Error of a panel is the
 * max-norm of (Kronrod - Gauss); global target max(abs_tol, rel_tol * |I|_inf).
 * A narrow panel whose error is below the change of f under a one-ulp
 * shift of its nodes is frozen: rounding of p sets the floor there.  Frozen
 * error is reported, not enforced.
 * Throws QuadratureError when the remaining error exceeds 1e3 * target.
 */
template <class F>
AdaptResult adapt(F&& f, std::size_t n, const std::vector<Panel>& initial, const QuadConfig& cfg,
                  const GKRule& rule, const std::string& where = "adapt") {
  using cplx = std::complex<double>;
  struct Item {
    Panel pn;
    std::vector<cplx> k;
  };
  std::vector<cplx> buf(n);
  long evals = 0;
  auto eval = [&](Panel pn) {
    Item it{pn, std::vector<cplx>(n)};
    std::vector<cplx> g(n);
    for_each_node(pn, rule, [&](double p, double wk, double wg) {
      f(p, buf.data());
      ++evals;
      for (std::size_t j = 0; j < n; ++j) {
        it.k[j] += wk * buf[j];
        if (wg != 0.0) g[j] += wg * buf[j];
      }
    });
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) e = std::max(e, std::abs(it.k[j] - g[j]));
    it.pn.err = std::isfinite(e) ? e : HUGE_VAL;
    return it;
  };
  std::vector<cplx> buf2(n);
  auto ulp_noise = [&](const Panel& pn) {
    double e = 0.0;
    for_each_node(pn, rule, [&](double p, double wk, double) {
      f(p, buf.data());
      f(std::nextafter(p, HUGE_VAL), buf2.data());
      evals += 2;
      double d = 0.0;
      for (std::size_t j = 0; j < n; ++j) d = std::max(d, std::abs(buf2[j] - buf[j]));
      e += std::abs(wk) * d;
    });
    return e;
  };
  auto cmp = [](const Item& a, const Item& b) { return a.pn.err < b.pn.err; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);
  std::vector<cplx> total(n);
  double err = 0.0;
  for (const Panel& pn : initial) {
    Item it = eval(pn);
    for (std::size_t j = 0; j < n; ++j) total[j] += it.k[j];
    err += it.pn.err;
    heap.push(std::move(it));
  }
  auto target = [&] {
    double m = 0.0;
    for (const auto& v : total) m = std::max(m, std::abs(v));
    return std::max(cfg.abs_tol, cfg.rel_tol * m);
  };
  // recompute the sums now and then to shed cancellation drift
  int since_resum = 0;
  std::vector<Item> frozen;
  double frozen_err = 0.0;
  while (!heap.empty() && err > target() && static_cast<int>(heap.size() + frozen.size()) < cfg.max_panels) {
    Item top = heap.top();
    const double tm = 0.5 * (top.pn.t0 + top.pn.t1);
    if (!(tm > top.pn.t0 && tm < top.pn.t1)) break;
    heap.pop();
    Panel l = top.pn, r = top.pn;
    l.t1 = tm;
    r.t0 = tm;
    Item il = eval(l), ir = eval(r);
    for (std::size_t j = 0; j < n; ++j) total[j] += il.k[j] + ir.k[j] - top.k[j];
    const double child = il.pn.err + ir.pn.err;
    const double width = top.pn.pb() - top.pn.pa();
    if (width <= 1e-6 * std::max(1.0, top.pn.pb()) && child > 0.5 * top.pn.err && child <= ulp_noise(top.pn)) {
      err -= top.pn.err;
      frozen_err += child;
      frozen.push_back(std::move(il));
      frozen.push_back(std::move(ir));
      continue;
    }
    err += child - top.pn.err;
    heap.push(std::move(il));
    heap.push(std::move(ir));
    if (++since_resum == 200) {
      since_resum = 0;
      auto copy = heap;
      std::fill(total.begin(), total.end(), cplx(0.0));
      err = 0.0;
      while (!copy.empty()) {
        for (std::size_t j = 0; j < n; ++j) total[j] += copy.top().k[j];
        err += copy.top().pn.err;
        copy.pop();
      }
      for (const Item& it : frozen)
        for (std::size_t j = 0; j < n; ++j) total[j] += it.k[j];
    }
  }
  for (Item& it : frozen) heap.push(std::move(it));
  AdaptResult res;
  res.value.assign(n, cplx(0.0));
  res.err = 0.0;
  Panel worst;
  while (!heap.empty()) {
    const Item& it = heap.top();
    for (std::size_t j = 0; j < n; ++j) res.value[j] += it.k[j];
    res.err += it.pn.err;
    if (it.pn.err > worst.err) worst = it.pn;
    res.panels.push_back(it.pn);
    heap.pop();
  }
  std::sort(res.panels.begin(), res.panels.end(), [](const Panel& a, const Panel& b) { return a.pa() < b.pa(); });
  res.tol = target();
  res.evaluations = evals;
  res.rounding_err = frozen_err;
  if (!(res.err - frozen_err <= 1e3 * res.tol)) throw QuadratureError(worst.pa(), worst.pb(), res.err, res.tol, where);
  return res;
}

//! Scalar convenience wrapper.
template <class F>
double adapt_real(F&& f, const std::vector<Panel>& initial, const QuadConfig& cfg, double* err = nullptr,
                  const std::string& where = "adapt") {
  auto r = adapt([&](double p, std::complex<double>* out) { out[0] = f(p); }, 1, initial, cfg, gk_rule<31>(), where);
  if (err) *err = r.err;
  return r.value[0].real();
}

}  // namespace slab
