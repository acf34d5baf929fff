// Command-line front end: flags and flat key = value config files into a
// RunConfig, figure presets, CSV emission and exit codes.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slablens/field.hpp"
#include "slablens/kernel.hpp"
#include "slablens/quadrature.hpp"
#include "slablens/sources.hpp"

namespace slab::cli {

enum class Command {
  FieldMap,
  EnergyScan,
  GRoots,
  GammaStar,
  ConjectureScan,
  ShieldingScan,
  BustingDemo,
  BoundsAudit,
  ResidualCheck
};

const char* command_name(Command c);

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kQuadrature = 3, kRootStatus = 4 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

//! gamma as a plain number or as a multiple of gamma* ("0.5gstar").
struct GammaSpec {
  double value = 0.5;
  bool of_gstar = true;

  double resolve() const;
  std::string text() const;
  static GammaSpec parse(const std::string& s);
  bool operator==(const GammaSpec&) const = default;
};

struct SourceConfig {
  std::string kind = "dipole";  //!< dipole, bump, sinc-bust, bessel-bust, current
  double d0 = 1.2;              //!< dipole position, or left edge of the support
  std::optional<double> d1;     //!< default d0 + 2
  double mx = 1.0, my = 0.0;    //!< dipole moment
  double y0 = 0.0;
  std::optional<double> amplitude;  //!< C; default 1e4 (bump), 1e3 (current)
  double h0 = -1.0, h1 = 1.0;

  double right() const { return d1 ? *d1 : d0 + 2.0; }
  bool operator==(const SourceConfig&) const = default;
};

struct RunConfig {
  Command command = Command::GammaStar;
  std::string preset;  //!< empty: none

  double a = 1.0;
  GammaSpec gamma;
  double delta = 1e-12;
  SourceConfig source;

  std::optional<GridSpec> grid;  //!< default window chosen from the source
  std::string quantity = "field";  //!< field-map: field or source
  std::optional<double> xi;        //!< default a

  std::vector<GammaSpec> gammas;  //!< scans; empty means {gamma}
  std::vector<double> deltas;     //!< empty means {delta}
  std::vector<double> d0s;        //!< empty means {source.d0}
  struct PGrid {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    bool operator==(const PGrid&) const = default;
  };
  std::optional<PGrid> p_grid;  //!< energy-scan: tabulate L(p) instead of integrating

  long samples = 10000;
  std::uint64_t seed = 20240611;

  QuadConfig quad;
  int threads = 0;
  std::string out;  //!< empty: standard output

  // passed through to the plotting side
  std::optional<double> clip;
  double lambda_bar = 0.0;  //!< scale bar length in units of lambda_gamma; 0: none

  bool operator==(const RunConfig&) const = default;
};

/*!
 * Parses arguments (without the program name). The command is the first
 * positional argument or the `command` key of a config file; a preset may
 * stand in for it. Precedence: flags, then config file, then preset, then
 * defaults. Throws UsageError on anything invalid.
 */
RunConfig parse(const std::vector<std::string>& args);

//! Flat `key = value` lines; parse({"--config", file}) of this gives the config back.
std::string render(const RunConfig& cfg);

//! Names of all presets, and the preset itself (throws UsageError if unknown).
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);
//! One-line description of the figure panel a preset reproduces.
std::string preset_caption(const std::string& name);

Params params_of(const RunConfig& cfg, double gamma);
SourceSpec source_of(const SourceConfig& s, const Params& params);

//! Writes the CSV for cfg to os; returns an Exit code. Library exceptions propagate.
int run(const RunConfig& cfg, std::ostream& os);

//! parse, then run into cfg.out or os; maps exceptions to exit codes, messages to err.
int main_entry(const std::vector<std::string>& args, std::ostream& os, std::ostream& err);

/*!
 * gamma* from the cache file if its algorithm version matches, else solved
 * and written back. Location: $SLABLENS_CACHE_DIR, else $XDG_CACHE_HOME/slablens,
 * else ~/.cache/slablens. Unwritable locations are ignored.
 */
double cached_gamma_star();

//! Tag of the gamma* solver; bump when compute_gamma_star changes.
inline constexpr const char* kGammaStarVersion = "bisect-maxG0-v1";

//! %.17g
std::string fmt(double v);

}  // namespace slab::cli
