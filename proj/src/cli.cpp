#include "slablens/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "slablens/dispersion.hpp"
#include "slablens/energy.hpp"

namespace slab::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::FieldMap, "field-map"},           {Command::EnergyScan, "energy-scan"},
    {Command::GRoots, "g-roots"},               {Command::GammaStar, "gamma-star"},
    {Command::ConjectureScan, "conjecture-scan"}, {Command::ShieldingScan, "shielding-scan"},
    {Command::BustingDemo, "busting-demo"},     {Command::BoundsAudit, "bounds-audit"},
    {Command::ResidualCheck, "residual-check"}};

const char* const kKinds[] = {"dipole", "bump", "sinc-bust", "bessel-bust", "current"};

struct Key {
  const char* name;
  const char* help;
};

// every flag is also a config key, same spelling
const Key kKeys[] = {
    {"preset", "figure preset (see --list-presets)"},
    {"a", "shell outer radius, the length unit"},
    {"gamma", "k0 a; a number or a multiple of gamma*, e.g. 0.5gstar"},
    {"delta", "loss, permittivity -1 - i delta in the shell"},
    {"source", "dipole | bump | sinc-bust | bessel-bust | current"},
    {"d0", "dipole position, or left edge of the source support"},
    {"d1", "right edge of the source support (default d0 + 2)"},
    {"moment", "dipole moment dx,dy"},
    {"y0", "dipole y position"},
    {"amplitude", "source amplitude C"},
    {"h0", "bump lower y edge"},
    {"h1", "bump upper y edge"},
    {"grid", "x0:x1:nx,y0:y1:ny"},
    {"quantity", "field-map output: field | source"},
    {"xi", "strip width for the energy, 0 < xi <= a (default a)"},
    {"gammas", "list g1,g2,.. or range lo:hi:n (same unit at both ends)"},
    {"deltas", "list, or geometric range lo:hi:n"},
    {"d0s", "list, or range lo:hi:n"},
    {"p-grid", "lo:hi:n; energy-scan tabulates L(p), bounds-audit the large-p margin"},
    {"samples", "bounds-audit sample count"},
    {"seed", "bounds-audit seed"},
    {"abs-tol", "quadrature absolute tolerance"},
    {"rel-tol", "quadrature relative tolerance"},
    {"max-panels", "quadrature panel cap"},
    {"threads", "worker cap, 0 = hardware"},
    {"out", "output file (default standard output)"},
    {"clip", "plot clipping level, echoed for the plotting side"},
    {"lambda-bar", "scale bar length in units of lambda_gamma, echoed"},
};

bool is_key(const std::string& k) {
  if (k == "command") return true;
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const Key& x) { return k == x.name; });
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double number(const std::string& s, const std::string& key) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (!s.empty() && *b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != e || !std::isfinite(v))
    throw UsageError(key + ": not a finite number: '" + s + "'");
  return v;
}

long integer(const std::string& s, const std::string& key) {
  long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw UsageError(key + ": not an integer: '" + s + "'");
  return v;
}

std::uint64_t unsigned_integer(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw UsageError(key + ": not an unsigned integer: '" + s + "'");
  return v;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

struct Range {
  std::string lo, hi;
  int n;
};

std::optional<Range> as_range(const std::string& s, const std::string& key) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) return std::nullopt;
  require(parts.size() == 3, key + ": range must be lo:hi:n");
  const long n = integer(parts[2], key);
  require(n >= 1 && n <= 1000000, key + ": range count out of [1, 1e6]");
  return Range{parts[0], parts[1], static_cast<int>(n)};
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> number_list(const std::string& s, const std::string& key, bool geometric) {
  if (const auto r = as_range(s, key)) {
    const double lo = number(r->lo, key), hi = number(r->hi, key);
    if (!geometric) return linspace(lo, hi, r->n);
    require(lo > 0 && hi > 0, key + ": geometric range needs positive ends");
    auto v = linspace(std::log(lo), std::log(hi), r->n);
    for (double& x : v) x = std::exp(x);
    v.front() = lo;
    v.back() = hi;
    return v;
  }
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(number(p, key));
  return out;
}

std::vector<GammaSpec> gamma_list(const std::string& s) {
  if (const auto r = as_range(s, "gammas")) {
    const GammaSpec lo = GammaSpec::parse(r->lo), hi = GammaSpec::parse(r->hi);
    require(lo.of_gstar == hi.of_gstar, "gammas: both range ends need the same unit");
    std::vector<GammaSpec> out;
    for (double v : linspace(lo.value, hi.value, r->n)) out.push_back({v, lo.of_gstar});
    return out;
  }
  std::vector<GammaSpec> out;
  for (const auto& p : split(s, ',')) out.push_back(GammaSpec::parse(p));
  return out;
}

GridSpec grid_of(const std::string& s) {
  const auto xy = split(s, ',');
  require(xy.size() == 2, "grid: expected x0:x1:nx,y0:y1:ny");
  const auto x = split(xy[0], ':'), y = split(xy[1], ':');
  require(x.size() == 3 && y.size() == 3, "grid: expected x0:x1:nx,y0:y1:ny");
  GridSpec g{number(x[0], "grid"), number(x[1], "grid"), static_cast<int>(integer(x[2], "grid")),
             number(y[0], "grid"),  number(y[1], "grid"), static_cast<int>(integer(y[2], "grid"))};
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw UsageError(std::string("grid: ") + e.what());
  }
  return g;
}

// shortest text that reads back to the same double
std::string exact(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct HelpRequested : UsageError {
  using UsageError::UsageError;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + exact(v[i]);
  return s;
}

// ---- presets

GridSpec default_grid(const SourceConfig& s, double a) {
  const double right = s.kind == "dipole" ? s.d0 : s.right();
  const double x0 = -3.0 * a, x1 = right + 3.0 * a;
  const double h = 0.05 * a;
  return {x0, x1, static_cast<int>(std::lround((x1 - x0) / h)) + 1, -5.0 * a, 5.0 * a,
          static_cast<int>(std::lround(10.0 * a / h)) + 1};
}

struct PresetDef {
  std::string name, caption;
  std::function<void(RunConfig&)> set;
};

RunConfig field_preset(const std::string& kind, double d0, GammaSpec g) {
  RunConfig c;
  c.command = Command::FieldMap;
  c.source.kind = kind;
  c.source.d0 = d0;
  c.gamma = g;
  c.delta = 1e-12;
  c.grid = default_grid(c.source, c.a);
  return c;
}

const std::vector<PresetDef>& presets() {
  static const std::vector<PresetDef> all = [] {
    std::vector<PresetDef> v;
    const GammaSpec g05{0.5, true}, g2{2.0, true}, g101{1.01, true}, g099{0.99, true};
    auto field = [&](std::string name, std::string caption, std::string kind, double d0, GammaSpec g,
                     std::optional<double> clip, double bar = 0.0) {
      v.push_back({std::move(name), std::move(caption), [=](RunConfig& c) {
                     c = field_preset(kind, d0, g);
                     c.clip = clip;
                     c.lambda_bar = bar;
                     if (kind == "sinc-bust" || kind == "bessel-bust") c.command = Command::BustingDemo;
                   }});
    };

    field("fig-slab", "geometry: core x < 0, shell 0 <= x <= a, matrix x > a; bump source on [d0, d0 + 2]", "bump",
          1.2, g05, std::nullopt);
    v.back().set = [f = v.back().set](RunConfig& c) {
      f(c);
      c.quantity = "source";
    };

    const struct {
      const char* tag;
      const char* what;
      const char* kind;
      GammaSpec g;
      const char* gtext;
    } families[] = {{"dipole-large-gamma", "dipole", "dipole", g2, "2 gamma*"},
                    {"general-large-gamma", "bump source, d1 = d0 + 2", "bump", g2, "2 gamma*"},
                    {"dipole-small-gamma", "dipole", "dipole", g05, "0.5 gamma*"},
                    {"general-small-gamma", "bump source, d1 = d0 + 2", "bump", g05, "0.5 gamma*"}};
    for (const auto& f : families) {
      const bool general_small = std::string(f.tag) == "general-small-gamma";
      const bool small = f.g == g05;
      for (int i = 0; i < 4; ++i) {
        const char panel = static_cast<char>('a' + i);
        const bool re = i % 2 == 0;
        const double d0 = i < 2 ? 4.0 : 1.2;
        std::optional<double> clip = 0.2;
        if (general_small) clip = re ? std::optional<double>(0.1) : std::nullopt;
        const double bar = small && panel == 'c' ? 2.0 : 0.0;
        std::string cap = std::string(re ? "Re V" : "Im V") + ", " + f.what + ", gamma = " + f.gtext +
                          ", d0 = " + (i < 2 ? "4a" : "1.2a") + ", delta = 1e-12";
        cap += clip ? ", clipped to +-" + exact(*clip) : ", unclipped";
        if (bar > 0) cap += ", scale bar 2 lambda_gamma";
        field(std::string("fig-") + f.tag + "-" + panel, cap, f.kind, d0, f.g, clip, bar);
      }
    }

    for (int i = 0; i < 4; ++i) {
      const char panel = static_cast<char>('a' + i);
      const bool above = i < 2;
      const std::optional<double> clip = panel == 'b' ? std::nullopt : std::optional<double>(0.1);
      std::string cap = std::string(i % 2 == 0 ? "Re V" : "Im V") + ", dipole, d0 = 1.2a, gamma = " +
                        (above ? "1.01" : "0.99") + " gamma*, delta = 1e-12" +
                        (clip ? ", clipped to +-0.1" : ", unclipped");
      field(std::string("fig-dipole-compare-") + panel, cap, "dipole", 1.2, above ? g101 : g099, clip);
    }

    for (int i = 0; i < 4; ++i) {
      const char panel = static_cast<char>('a' + i);
      const bool sinc = i < 2;
      std::string cap = std::string(i % 2 == 0 ? "Re V" : "Im V") + ", " +
                        (sinc ? "sinc-type busting source" : "Bessel-type busting source") +
                        ", d0 = 1.2a, d1 = d0 + 2, gamma = 0.5 gamma*, delta = 1e-12";
      field(std::string("fig-alr-bust-") + panel, cap, sinc ? "sinc-bust" : "bessel-bust", 1.2, g05, std::nullopt);
    }

    field("fig-realistic-source", "source density of the current-sheet source, C = 1e3, d0 = 1.2a, d1 = d0 + 2",
          "current", 1.2, g05, std::nullopt);
    v.back().set = [f = v.back().set](RunConfig& c) {
      f(c);
      c.quantity = "source";
    };
    for (int i = 0; i < 2; ++i)
      field(std::string("fig-realistic-sine-") + static_cast<char>('a' + i),
            std::string(i == 0 ? "Re V" : "Im V") +
                ", current-sheet source, d0 = 1.2a, gamma = 0.5 gamma*, delta = 1e-12, clipped to +-0.2",
            "current", 1.2, g05, 0.2);

    // E_delta(a) surfaces; ranges from the text where the caption leaves an axis free
    const std::vector<double> deltas = number_list("1e-12:1e-10:5", "deltas", true);
    const std::vector<GammaSpec> gammas = gamma_list("1.01gstar:2gstar:5");
    const std::vector<double> d0s = number_list("1.2:2:5", "d0s", false);
    const struct {
      char panel;
      const char* cap;
      int axes;  // bit 0 delta, 1 gamma, 2 d0
      GammaSpec g;
      double delta, d0;
    } pd[] = {{'a', "E_delta(a) over delta and gamma, dipole, d0 = 1.2a", 3, g101, 1e-12, 1.2},
              {'b', "E_delta(a) over delta and gamma, dipole, d0 = 4a", 3, g101, 1e-12, 4.0},
              {'c', "E_delta(a) over delta and d0, dipole, gamma = 1.01 gamma*", 5, g101, 1e-12, 1.2},
              {'d', "E_delta(a) over delta and d0, dipole, gamma = 2 gamma*", 5, g2, 1e-12, 1.2},
              {'e', "E_delta(a) over gamma and d0, dipole, delta = 1e-10", 6, g101, 1e-10, 1.2},
              {'f', "E_delta(a) over gamma and d0, dipole, delta = 1e-12", 6, g101, 1e-12, 1.2}};
    for (const auto& p : pd)
      v.push_back({std::string("fig-dipole-bounded-pd-") + p.panel, p.cap, [=](RunConfig& c) {
                     c = RunConfig{};
                     c.command = Command::EnergyScan;
                     c.gamma = p.g;
                     c.delta = p.delta;
                     c.source.d0 = p.d0;
                     if (p.axes & 1) c.deltas = deltas;
                     if (p.axes & 2) c.gammas = gammas;
                     if (p.axes & 4) c.d0s = d0s;
                   }});

    for (int i = 0; i < 4; ++i) {
      const char panel = static_cast<char>('a' + i);
      const GammaSpec g = i < 2 ? g099 : g101;
      const double d0 = i % 2 == 0 ? 1.2 : 4.0;
      v.push_back({std::string("fig-dipole-integrand-") + panel,
                   std::string("L_delta(p) for several delta, dipole, gamma = ") + (i < 2 ? "0.99" : "1.01") +
                       " gamma*, d0 = " + (d0 == 1.2 ? "1.2a" : "4a"),
                   [=](RunConfig& c) {
                     c = RunConfig{};
                     c.command = Command::EnergyScan;
                     c.gamma = g;
                     c.source.d0 = d0;
                     c.deltas = {1e-12, 1e-11, 1e-10};
                     c.p_grid = RunConfig::PGrid{0.0, 6.0, 1201};
                   }});
    }

    for (int i = 0; i < 2; ++i) {
      const bool first = i == 0;
      const std::string root = first ? "p1" : "p2";
      v.push_back({std::string("fig-g-delta-") + static_cast<char>('a' + i),
                   "|g_delta(" + root + ")|/delta over 1e-12 <= delta <= 1e-10, 0.1 gamma* <= gamma <= 0.99 gamma*",
                   [](RunConfig& c) {
                     c = RunConfig{};
                     c.command = Command::ConjectureScan;
                     c.deltas = number_list("1e-12:1e-10:9", "deltas", true);
                     c.gammas = gamma_list("0.1gstar:0.99gstar:10");
                   }});
      v.push_back({std::string("fig-m-delta-") + static_cast<char>('a' + i),
                   "M_delta(" + root + ") over 1e-12 <= delta <= 1e-10, 0.1 gamma* <= gamma <= 0.99 gamma*",
                   v.back().set});
    }

    for (int i = 0; i < 2; ++i)
      v.push_back({std::string("fig-large-p-int-") + static_cast<char>('a' + i),
                   std::string("large-p lower bound on |g_delta| - |g0|/2 for gamma = gamma*, 1.5 gamma*, 2 gamma*, ") +
                       (i == 0 ? "1 <= p <= 7" : "7 <= p <= 10"),
                   [i](RunConfig& c) {
                     c = RunConfig{};
                     c.command = Command::BoundsAudit;
                     c.gammas = {{1.0, true}, {1.5, true}, {2.0, true}};
                     c.p_grid = i == 0 ? RunConfig::PGrid{1.0, 7.0, 601} : RunConfig::PGrid{7.0, 10.0, 301};
                   }});
    return v;
  }();
  return all;
}

const PresetDef& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw UsageError("unknown preset '" + name + "' (see --list-presets)");
}

// ---- validation

void validate(const RunConfig& c) {
  require(c.a > 0, "a must be positive");
  require(c.delta > 0 && c.delta <= 1.0, "delta must be in (0, 1]");
  require(c.gamma.value > 0, "gamma must be positive");
  for (const auto& g : c.gammas) require(g.value > 0, "gammas must be positive");
  for (double d : c.deltas) require(d > 0 && d <= 1.0, "deltas must be in (0, 1]");
  const auto& s = c.source;
  require(std::find(std::begin(kKinds), std::end(kKinds), s.kind) != std::end(kKinds),
          "source: unknown kind '" + s.kind + "'");
  require(s.d0 > c.a, "d0 must lie in the matrix, d0 > a");
  for (double d : c.d0s) require(d > c.a, "d0s must lie in the matrix, d0 > a");
  if (s.kind != "dipole") require(s.right() > s.d0, "d1 must exceed d0");
  if (s.kind == "dipole") require(s.mx != 0.0 || s.my != 0.0, "moment must be nonzero");
  if (s.amplitude) require(*s.amplitude > 0, "amplitude must be positive");
  require(s.h0 < s.h1, "h0 must be below h1");
  if (c.grid) {
    try {
      c.grid->validate();
    } catch (const DomainError& e) {
      throw UsageError(std::string("grid: ") + e.what());
    }
  }
  require(c.quantity == "field" || c.quantity == "source", "quantity must be field or source");
  if (c.quantity == "source") require(s.kind != "dipole", "quantity=source needs an extended source");
  if (c.xi) require(*c.xi > 0 && *c.xi <= c.a, "xi must be in (0, a]");
  if (c.p_grid) {
    require(c.p_grid->lo >= 0 && c.p_grid->hi > c.p_grid->lo, "p-grid needs 0 <= lo < hi");
    require(c.p_grid->n >= 2, "p-grid needs at least 2 points");
  }
  require(c.samples > 0, "samples must be positive");
  require(c.quad.abs_tol > 0 && c.quad.rel_tol > 0, "quadrature tolerances must be positive");
  require(c.quad.max_panels >= 1, "max-panels must be at least 1");
  require(c.threads >= 0, "threads must be >= 0");
  if (c.clip) require(*c.clip > 0, "clip must be positive");
  require(c.lambda_bar >= 0, "lambda-bar must be >= 0");
  if (c.command == Command::BustingDemo)
    require(s.kind == "sinc-bust" || s.kind == "bessel-bust" || s.kind == "current",
            "busting-demo needs source sinc-bust, bessel-bust or current");
}

void apply(RunConfig& c, const std::string& key, const std::string& val) {
  if (key == "command") {
    for (const auto& [cmd, name] : kCommands)
      if (val == name) {
        c.command = cmd;
        return;
      }
    throw UsageError("unknown command '" + val + "'");
  }
  if (key == "preset") c.preset = val;
  else if (key == "a") c.a = number(val, key);
  else if (key == "gamma") c.gamma = GammaSpec::parse(val);
  else if (key == "delta") c.delta = number(val, key);
  else if (key == "source") c.source.kind = val;
  else if (key == "d0") c.source.d0 = number(val, key);
  else if (key == "d1") c.source.d1 = number(val, key);
  else if (key == "moment") {
    const auto m = split(val, ',');
    require(m.size() == 2, "moment: expected dx,dy");
    c.source.mx = number(m[0], key);
    c.source.my = number(m[1], key);
  } else if (key == "y0") c.source.y0 = number(val, key);
  else if (key == "amplitude") c.source.amplitude = number(val, key);
  else if (key == "h0") c.source.h0 = number(val, key);
  else if (key == "h1") c.source.h1 = number(val, key);
  else if (key == "grid") c.grid = grid_of(val);
  else if (key == "quantity") c.quantity = val;
  else if (key == "xi") c.xi = number(val, key);
  else if (key == "gammas") c.gammas = gamma_list(val);
  else if (key == "deltas") c.deltas = number_list(val, key, true);
  else if (key == "d0s") c.d0s = number_list(val, key, false);
  else if (key == "p-grid") {
    const auto r = as_range(val, key);
    require(r.has_value(), "p-grid: expected lo:hi:n");
    c.p_grid = RunConfig::PGrid{number(r->lo, key), number(r->hi, key), r->n};
  } else if (key == "samples") c.samples = integer(val, key);
  else if (key == "seed") c.seed = unsigned_integer(val, key);
  else if (key == "abs-tol") c.quad.abs_tol = number(val, key);
  else if (key == "rel-tol") c.quad.rel_tol = number(val, key);
  else if (key == "max-panels") c.quad.max_panels = static_cast<int>(integer(val, key));
  else if (key == "threads") c.threads = static_cast<int>(integer(val, key));
  else if (key == "out") c.out = val;
  else if (key == "clip") c.clip = number(val, key);
  else if (key == "lambda-bar") c.lambda_bar = number(val, key);
  else throw UsageError("unknown key '" + key + "'");
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, path + ":" + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
    require(is_key(key), path + ":" + std::to_string(no) + ": unknown key '" + key + "'");
    require(!kv.count(key), path + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
    kv[key] = val;
  }
  return kv;
}

// ---- output

struct Csv {
  std::ostream& os;

  void comment(const std::string& s) { os << "# " << s << '\n'; }
  void header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      os << (first ? "" : ",") << c;
      first = false;
    }
    os << '\n';
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os << (first ? "" : ",") << cell(v), first = false), ...);
    os << '\n';
  }
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(char v) { return std::string(1, v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
};

void echo(const RunConfig& c, Csv& csv) {
  csv.comment(std::string("slablens ") + command_name(c.command));
  // worker count and destination do not change the data
  std::istringstream in(render(c));
  for (std::string line; std::getline(in, line);)
    if (line.rfind("threads =", 0) != 0 && line.rfind("out =", 0) != 0) csv.comment(line);
  if (!c.preset.empty()) csv.comment("caption = " + preset_caption(c.preset));
  csv.comment("gamma_star = " + fmt(cached_gamma_star()));
  csv.comment("gamma_value = " + fmt(c.gamma.resolve()));
}

std::vector<GammaSpec> gammas_of(const RunConfig& c) { return c.gammas.empty() ? std::vector{c.gamma} : c.gammas; }
std::vector<double> deltas_of(const RunConfig& c) { return c.deltas.empty() ? std::vector{c.delta} : c.deltas; }
std::vector<double> d0s_of(const RunConfig& c) { return c.d0s.empty() ? std::vector{c.source.d0} : c.d0s; }

SourceConfig with_d0(SourceConfig s, double d0) {
  if (!s.d1) s.d1 = d0 + 2.0;
  else s.d1 = *s.d1 + (d0 - s.d0);  // keep the width
  s.d0 = d0;
  return s;
}

void write_field(const FieldGrid& f, Csv& csv) {
  csv.header({"x", "y", "re", "im", "region"});
  for (int i = 0; i < f.spec.nx; ++i)
    for (int j = 0; j < f.spec.ny; ++j) {
      const cplx v = f.at(i, j);
      csv.row(f.spec.x(i), f.spec.y(j), v.real(), v.imag(),
              region_letter(f.regions[static_cast<std::size_t>(i) * f.spec.ny + j]));
    }
}

int field_like(const RunConfig& c, Csv& csv, bool busting) {
  const Params P = params_of(c, c.gamma.resolve());
  const SourceSpec src = source_of(c.source, P);
  const GridSpec g = c.grid ? *c.grid : default_grid(c.source, c.a);
  int code = kOk;
  if (c.lambda_bar > 0) csv.comment("lambda_gamma = " + fmt(lambda_gamma(P)));
  if (busting) {
    const RootPair r = find_roots(P.gamma());
    const double nf = norm_l2(src);
    double worst = 0.0;
    for (double p : {r.p1, r.p2}) worst = std::max(worst, std::abs(I_scaled(src, p, P).value()) / nf);
    const bool ok = worst <= 1e-10;
    csv.comment("check: max over roots of |I_p|/||f|| = " + fmt(worst) + " (limit 1e-10) " + (ok ? "pass" : "FAIL"));
    if (!ok) code = kCheckFailed;
  }
  if (c.quantity == "source") {
    FieldGrid f{g, {}, {}};
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        f.values.emplace_back(spatial_density(src, g.x(i), g.y(j)), 0.0);
        f.regions.push_back(P.region_of(g.x(i)));
      }
    write_field(f, csv);
  } else {
    write_field(field_map(g, src, P, c.quad, c.threads), csv);
  }
  return code;
}

int energy_scan(const RunConfig& c, Csv& csv) {
  const double xi = c.xi ? *c.xi : c.a;
  if (c.p_grid) csv.header({"delta", "gamma", "d0", "xi", "p", "L"});
  else csv.header({"delta", "gamma", "d0", "xi", "total", "small_p", "large_p", "err_est"});
  for (double d : deltas_of(c))
    for (const GammaSpec& gs : gammas_of(c))
      for (double d0 : d0s_of(c)) {
        RunConfig one = c;
        one.delta = d;
        const double g = gs.resolve();
        const Params P = params_of(one, g);
        const SourceSpec src = source_of(with_d0(c.source, d0), P);
        if (c.p_grid) {
          for (double p : linspace(c.p_grid->lo, c.p_grid->hi, c.p_grid->n))
            csv.row(d, g, d0, xi, p, L_integrand(p, src, P, xi));
        } else {
          const EnergyBreakdown e = energy(src, P, xi, c.quad);
          csv.row(d, g, d0, xi, e.total, e.small_p, e.large_p, e.quad_error_estimate);
        }
      }
  return kOk;
}

// core samples for the shielding scan: x in {-2a, -1.5a, -a}, y in [-2a, 2a]
GridSpec shielding_grid(double a) { return {-2.0 * a, -a, 3, -2.0 * a, 2.0 * a, 9}; }

int shielding_scan(const RunConfig& c, Csv& csv) {
  const auto gs = c.gammas.empty() ? std::vector<GammaSpec>{{2.0, true}, {3.0, true}, {4.0, true}} : c.gammas;
  const GridSpec g = shielding_grid(c.a);
  csv.comment("core samples: x = -2a, -1.5a, -a; y = -2a..2a step 0.5a");
  csv.header({"gamma", "sup_core"});
  for (const GammaSpec& s : gs) {
    const Params P = params_of(c, s.resolve());
    const FieldGrid f = field_map(g, source_of(c.source, P), P, c.quad, c.threads);
    double sup = 0.0;
    for (const cplx& v : f.values) sup = std::max(sup, std::abs(v));
    csv.row(P.gamma(), sup);
  }
  return kOk;
}

int bounds(const RunConfig& c, Csv& csv) {
  if (c.p_grid) {
    csv.header({"gamma", "p", "margin"});
    for (const GammaSpec& s : gammas_of(c))
      for (double p : linspace(c.p_grid->lo, c.p_grid->hi, c.p_grid->n))
        csv.row(s.resolve(), p, large_p_margin(p, s.resolve()));
    return kOk;
  }
  const BoundsReport r = bounds_audit(c.samples, c.seed);
  csv.header({"check", "samples", "violations", "max_ratio", "witness_p", "witness_delta", "witness_gamma"});
  for (const auto& k : r.checks) {
    const double nan = std::nan("");
    const BoundsWitness w = k.witness ? *k.witness : BoundsWitness{nan, nan, nan};
    csv.row(k.name, k.samples, k.violations, k.max_ratio, w.p, w.delta, w.gamma);
  }
  return r.total_violations() == 0 ? kOk : kCheckFailed;
}

fs::path cache_dir() {
  if (const char* d = std::getenv("SLABLENS_CACHE_DIR"); d && *d) return d;
  if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return fs::path(d) / "slablens";
  if (const char* d = std::getenv("HOME"); d && *d) return fs::path(d) / ".cache" / "slablens";
  return {};
}

}  // namespace

// ---- public

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* command_name(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

double GammaSpec::resolve() const { return of_gstar ? value * cached_gamma_star() : value; }

std::string GammaSpec::text() const { return exact(value) + (of_gstar ? "gstar" : ""); }

GammaSpec GammaSpec::parse(const std::string& s0) {
  const std::string s = trim(s0);
  static const std::string suffix = "gstar";
  if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const std::string head = trim(s.substr(0, s.size() - suffix.size()));
    return {head.empty() ? 1.0 : number(head, "gamma"), true};
  }
  return {number(s, "gamma"), false};
}

Params params_of(const RunConfig& cfg, double gamma) {
  try {
    return Params(cfg.a, gamma / cfg.a, cfg.delta);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

SourceSpec source_of(const SourceConfig& s, const Params& P) {
  const double a = P.a();
  if (s.kind == "dipole") return SourceSpec::dipole(s.d0, s.mx, s.my, s.y0, a);
  if (s.kind == "bump") return SourceSpec::bump(s.d0, s.right(), s.amplitude.value_or(1e4), s.h0, s.h1, a);
  if (s.kind == "sinc-bust") return SourceSpec::sinc_bust(P, s.d0, s.right());
  if (s.kind == "bessel-bust") return SourceSpec::bessel_bust(P, s.d0, s.right());
  if (s.kind == "current") return SourceSpec::current(P, s.d0, s.right(), s.amplitude.value_or(1e3));
  throw UsageError("source: unknown kind '" + s.kind + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : presets()) out.push_back(p.name);
  return out;
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  find_preset(name).set(c);
  c.preset = name;
  return c;
}

std::string preset_caption(const std::string& name) { return find_preset(name).caption; }

std::string render(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  kv("command", command_name(c.command));
  if (!c.preset.empty()) kv("preset", c.preset);
  kv("a", exact(c.a));
  kv("gamma", c.gamma.text());
  kv("delta", exact(c.delta));
  kv("source", c.source.kind);
  kv("d0", exact(c.source.d0));
  if (c.source.d1) kv("d1", exact(*c.source.d1));
  kv("moment", exact(c.source.mx) + "," + exact(c.source.my));
  kv("y0", exact(c.source.y0));
  if (c.source.amplitude) kv("amplitude", exact(*c.source.amplitude));
  kv("h0", exact(c.source.h0));
  kv("h1", exact(c.source.h1));
  if (c.grid)
    kv("grid", exact(c.grid->x0) + ":" + exact(c.grid->x1) + ":" + std::to_string(c.grid->nx) + "," + exact(c.grid->y0) +
                   ":" + exact(c.grid->y1) + ":" + std::to_string(c.grid->ny));
  kv("quantity", c.quantity);
  if (c.xi) kv("xi", exact(*c.xi));
  if (!c.gammas.empty()) {
    std::string s;
    for (std::size_t i = 0; i < c.gammas.size(); ++i) s += (i ? "," : "") + c.gammas[i].text();
    kv("gammas", s);
  }
  if (!c.deltas.empty()) kv("deltas", join(c.deltas));
  if (!c.d0s.empty()) kv("d0s", join(c.d0s));
  if (c.p_grid) kv("p-grid", exact(c.p_grid->lo) + ":" + exact(c.p_grid->hi) + ":" + std::to_string(c.p_grid->n));
  kv("samples", std::to_string(c.samples));
  kv("seed", std::to_string(c.seed));
  kv("abs-tol", exact(c.quad.abs_tol));
  kv("rel-tol", exact(c.quad.rel_tol));
  kv("max-panels", std::to_string(c.quad.max_panels));
  kv("threads", std::to_string(c.threads));
  if (!c.out.empty()) kv("out", c.out);
  if (c.clip) kv("clip", exact(*c.clip));
  kv("lambda-bar", exact(c.lambda_bar));
  return o.str();
}

RunConfig parse(const std::vector<std::string>& args) {
  CLI::App app{"slablens: Helmholtz slab lens with permittivity -1 - i delta"};
  std::map<std::string, std::string> vals;
  std::map<std::string, CLI::Option*> opts;
  std::string command, config;
  app.add_option("command", command, "one of field-map, energy-scan, g-roots, gamma-star, conjecture-scan, "
                                     "shielding-scan, busting-demo, bounds-audit, residual-check");
  app.add_option("--config", config, "flat key = value file; flags override it");
  for (const Key& k : kKeys)
    opts[k.name] = app.add_option(std::string("--") + k.name, vals[k.name], k.help)
                       ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  std::map<std::string, std::string> given;
  if (!config.empty()) given = read_config(config);
  if (!command.empty()) given["command"] = command;
  for (const auto& [k, o] : opts)
    if (o->count() > 0) given[k] = vals[k];

  RunConfig c;
  if (const auto it = given.find("preset"); it != given.end()) c = preset(it->second);
  else if (!given.count("command")) throw UsageError("no command given (and no preset)");
  for (const auto& [k, v] : given) apply(c, k, v);
  validate(c);
  return c;
}

int run(const RunConfig& c, std::ostream& os) {
  Csv csv{os};
  echo(c, csv);
  switch (c.command) {
    case Command::GammaStar: {
      const GammaStarResult& g = gamma_star();
      csv.header({"gamma_star", "lo", "hi", "inner_max_s"});
      csv.row(g.gamma_star, g.lo, g.hi, g.inner_max_s);
      return kOk;
    }
    case Command::GRoots: {
      csv.header({"gamma", "p1", "p2", "status"});
      for (const GammaSpec& s : gammas_of(c)) {
        const RootPair r = find_roots(s.resolve());
        csv.row(r.gamma, r.p1, r.p2, std::string(root_status_name(r.status)));
      }
      return kOk;
    }
    case Command::FieldMap: return field_like(c, csv, false);
    case Command::BustingDemo: return field_like(c, csv, true);
    case Command::EnergyScan: return energy_scan(c, csv);
    case Command::ConjectureScan: {
      std::vector<double> gs;
      for (const GammaSpec& s : gammas_of(c)) gs.push_back(s.resolve());
      csv.header({"delta", "gamma", "root", "p_root", "g_ratio", "m_value"});
      for (const auto& r : conjecture_scan(deltas_of(c), gs))
        csv.row(r.delta, r.gamma, r.root_index, r.p_root, r.g_ratio, r.m_value);
      return kOk;
    }
    case Command::ShieldingScan: return shielding_scan(c, csv);
    case Command::BoundsAudit: return bounds(c, csv);
    case Command::ResidualCheck: {
      const Params P = params_of(c, c.gamma.resolve());
      const SourceSpec src = source_of(c.source, P);
      const ResidualReport r = residuals(src, P, c.quad);
      csv.header({"source", "continuity_max", "pde_max", "outgoing_decay"});
      csv.row(c.source.kind, r.continuity_max, r.pde_max, r.outgoing_decay);
      return kOk;
    }
  }
  return kUsage;
}

int main_entry(const std::vector<std::string>& args, std::ostream& os, std::ostream& err) {
  if (std::find(args.begin(), args.end(), "--list-presets") != args.end()) {
    for (const auto& p : presets()) os << p.name << "  " << p.caption << '\n';
    return kOk;
  }
  try {
    const RunConfig c = parse(args);
    if (c.out.empty() || c.out == "-") return run(c, os);
    // write to a buffer first so a failed run leaves no partial file
    std::ostringstream buf;
    const int code = run(c, buf);
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + c.out + "'");
    f << buf.str();
    return code;
  } catch (const HelpRequested& e) {
    os << e.what() << "  --list-presets              list the figure presets\n";
    return kOk;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedSource& e) {
    err << "unsupported source: " << e.what() << '\n';
    return kUsage;
  } catch (const QuadratureError& e) {
    err << e.what() << '\n';
    return kQuadrature;
  } catch (const PoleContactError& e) {
    err << e.what() << '\n';
    return kQuadrature;
  } catch (const RootStatusError& e) {
    err << "root status " << root_status_name(e.status) << ": " << e.what() << '\n';
    return kRootStatus;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

double cached_gamma_star() {
  static const double value = [] {
    const fs::path dir = cache_dir();
    const fs::path file = dir / "gamma_star";
    if (!dir.empty()) {
      std::ifstream in(file);
      std::string version;
      GammaStarResult r;
      if (in >> version >> r.gamma_star >> r.lo >> r.hi >> r.inner_max_s && version == kGammaStarVersion &&
          r.lo <= r.gamma_star && r.gamma_star <= r.hi) {
        seed_gamma_star(r);
        return gamma_star().gamma_star;
      }
    }
    const GammaStarResult& r = gamma_star();
    if (!dir.empty()) {
      std::error_code ec;
      fs::create_directories(dir, ec);
      const fs::path tmp = file.string() + ".tmp";
      std::ofstream out(tmp);
      out << kGammaStarVersion << ' ' << fmt(r.gamma_star) << ' ' << fmt(r.lo) << ' ' << fmt(r.hi) << ' '
          << fmt(r.inner_max_s) << '\n';
      out.close();
      if (out) fs::rename(tmp, file, ec);
    }
    return r.gamma_star;
  }();
  return value;
}

}  // namespace slab::cli
