#ifndef CAVITYWALK_CLI_HPP
#define CAVITYWALK_CLI_HPP

// Command-line front end: argument/config parsing and dataset writers.
//
// Exit status: 0 success, 1 numeric verification failure, 2 usage error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <locale>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cavitywalk/correlations.hpp"
#include "cavitywalk/fock.hpp"
#include "cavitywalk/lattice.hpp"
#include "cavitywalk/sweep.hpp"
#include "cavitywalk/verify.hpp"

namespace cavitywalk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { propagator, evolve, correlations, max_deloc, fig1, fig2, negativity, verify };
enum class Format { csv, json };

struct RunConfig {
  Command command = Command::verify;
  int n = 2;
  bool n_given = false;
  double omega = 1.0;
  double hopping = 0.1;
  int r = 1;
  int s = 2;
  double theta = std::numbers::pi / 4;
  double phi = 0.0;
  bool theta_given = false;
  bool phi_given = false;
  double t = 0.0;
  double t_max = 0.0;  // resolved to 400/|J| when not given
  double dt = 0.0;     // resolved to 0.05/|J| when not given
  bool refine = true;
  std::string out;     // empty: stdout
  Format format = Format::csv;
  std::uint64_t seed = 20240611;

  ArrayModel model() const { return ArrayModel{n, omega, hopping}; }
  PsiFamily family() const { return PsiFamily{r, s, theta, phi}; }
  TimeGrid grid() const { return TimeGrid{t_max, dt, refine}; }
};

/// 17 significant digits with a '.' decimal point, independent of locale.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void require(bool ok, const std::string& flag, const std::string& what) {
  if (!ok) throw UsageError(flag + ": " + what);
}

inline bool needs_family(Command c) {
  return c == Command::evolve || c == Command::correlations || c == Command::max_deloc;
}

inline bool needs_grid(Command c) {
  return c == Command::max_deloc || c == Command::fig1 || c == Command::fig2;
}

}  // namespace detail

/// Parses argv (without the program name). Config-file values act as
/// defaults; explicit flags override them.
inline RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Two-photon dynamics in coupled cavity arrays", "cavitywalk"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key = value file supplying defaults");

  const std::map<std::string, Command> commands{
      {"propagator", Command::propagator}, {"evolve", Command::evolve},
      {"correlations", Command::correlations}, {"max-deloc", Command::max_deloc},
      {"fig1", Command::fig1}, {"fig2", Command::fig2},
      {"negativity", Command::negativity}, {"verify", Command::verify}};
  std::string command;
  app.add_option("command", command, "propagator|evolve|correlations|max-deloc|fig1|fig2|negativity|verify")
      ->required();

  std::optional<int> r;
  std::optional<int> s;
  std::optional<double> t_max;
  std::optional<double> dt;
  std::string format = "csv";
  app.add_option("--n", cfg.n, "number of cavities");
  app.add_option("--omega", cfg.omega, "cavity frequency");
  app.add_option("--j", cfg.hopping, "hopping strength");
  app.add_option("--r", r, "first initially occupied cavity (1-based)");
  app.add_option("--s", s, "second initially occupied cavity (1-based)");
  app.add_option("--theta", cfg.theta, "mixing angle [rad]");
  app.add_option("--phi", cfg.phi, "relative phase [rad]");
  app.add_option("--t", cfg.t, "evaluation time");
  app.add_option("--t-max", t_max, "time horizon for maximum searches");
  app.add_option("--dt", dt, "coarse time step for maximum searches");
  app.add_flag("--refine,!--no-refine", cfg.refine, "golden-section refinement of maxima");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--format", format, "csv or json");
  app.add_option("--seed", cfg.seed, "seed for verify's random cases");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const auto it = commands.find(command);
  detail::require(it != commands.end(), "command", "unknown command '" + command + "'");
  cfg.command = it->second;
  cfg.n_given = app.count("--n") > 0;
  cfg.theta_given = app.count("--theta") > 0;
  cfg.phi_given = app.count("--phi") > 0;

  detail::require(format == "csv" || format == "json", "--format", "must be csv or json");
  cfg.format = (format == "json") ? Format::json : Format::csv;

  detail::require(cfg.n >= 1, "--n", "must be >= 1");
  detail::require(std::isfinite(cfg.omega), "--omega", "must be finite");
  detail::require(std::isfinite(cfg.hopping), "--j", "must be finite");
  detail::require(std::isfinite(cfg.theta), "--theta", "must be finite");
  detail::require(std::isfinite(cfg.phi), "--phi", "must be finite");
  detail::require(std::isfinite(cfg.t), "--t", "must be finite");

  cfg.r = r.value_or(std::max(1, cfg.n / 2));
  cfg.s = s.value_or(cfg.r + 1);
  if (detail::needs_family(cfg.command)) {
    detail::require(cfg.n >= 2, "--n", "this command needs at least two cavities");
    detail::require(cfg.r >= 1 && cfg.r <= cfg.n, "--r", "must lie in 1..N");
    detail::require(cfg.s >= 1 && cfg.s <= cfg.n, "--s", "must lie in 1..N");
    detail::require(cfg.r != cfg.s, "--s", "must differ from --r");
  }
  if (cfg.command == Command::fig1 || cfg.command == Command::fig2) {
    detail::require(cfg.n >= 2, "--n", "figure sweeps need at least two cavities");
  }

  if (detail::needs_grid(cfg.command)) {
    detail::require(t_max.has_value() || cfg.hopping != 0.0, "--j",
                    "default time grid needs nonzero hopping");
    detail::require(dt.has_value() || cfg.hopping != 0.0, "--j",
                    "default time grid needs nonzero hopping");
  }
  const double j = std::abs(cfg.hopping);
  cfg.t_max = t_max.value_or(j > 0 ? 400.0 / j : 0.0);
  cfg.dt = dt.value_or(j > 0 ? 0.05 / j : 0.0);
  if (detail::needs_grid(cfg.command)) {
    detail::require(std::isfinite(cfg.t_max) && cfg.t_max > 0, "--t-max", "must be positive");
    detail::require(std::isfinite(cfg.dt) && cfg.dt > 0, "--dt", "must be positive");
    detail::require(cfg.dt < cfg.t_max, "--dt", "must be smaller than --t-max");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

inline constexpr const char* kSweepHeader = "N,r,s,theta,phi,s_max,t_at_max,negativity";

inline void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows, Format format) {
  if (format == Format::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      arr.push_back({{"N", row.n_cavities}, {"r", row.r}, {"s", row.s}, {"theta", row.theta},
                     {"phi", row.phi}, {"s_max", row.s_max}, {"t_at_max", row.t_at_max},
                     {"negativity", row.negativity}});
    }
    os << arr.dump(2) << '\n';
    return;
  }
  os << kSweepHeader << '\n';
  for (const auto& row : rows) {
    os << row.n_cavities << ',' << row.r << ',' << row.s << ',' << format_real(row.theta) << ','
       << format_real(row.phi) << ',' << format_real(row.s_max) << ','
       << format_real(row.t_at_max) << ',' << format_real(row.negativity) << '\n';
  }
}

inline void write_propagator(std::ostream& os, const Propagator& g, Format format) {
  const int n = g.size();
  if (format == Format::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (int j = 1; j <= n; ++j) {
      for (int l = 1; l <= n; ++l) {
        arr.push_back({{"j", j}, {"l", l}, {"re", g(j, l).real()}, {"im", g(j, l).imag()}});
      }
    }
    os << arr.dump(2) << '\n';
    return;
  }
  os << "j,l,re,im\n";
  for (int j = 1; j <= n; ++j) {
    for (int l = 1; l <= n; ++l) {
      os << j << ',' << l << ',' << format_real(g(j, l).real()) << ','
         << format_real(g(j, l).imag()) << '\n';
    }
  }
}

inline void write_state(std::ostream& os, const TwoPhotonState& state, Format format) {
  const auto& basis = state.basis;
  if (format == Format::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < basis.dim(); ++i) {
      const auto [m, n] = basis.pair(i);
      const Complex c = state.amplitudes(i);
      arr.push_back({{"m", m}, {"n", n}, {"re", c.real()}, {"im", c.imag()},
                     {"probability", std::norm(c)}});
    }
    os << arr.dump(2) << '\n';
    return;
  }
  os << "m,n,re,im,probability\n";
  for (int i = 0; i < basis.dim(); ++i) {
    const auto [m, n] = basis.pair(i);
    const Complex c = state.amplitudes(i);
    os << m << ',' << n << ',' << format_real(c.real()) << ',' << format_real(c.imag()) << ','
       << format_real(std::norm(c)) << '\n';
  }
}

/// Rows for m <= n, so the Q column sums to one.
inline void write_correlations(std::ostream& os, const CorrelationReport& rep, Format format) {
  const int n = rep.size();
  if (format == Format::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (int m = 1; m <= n; ++m) {
      for (int k = m; k <= n; ++k) {
        arr.push_back({{"m", m}, {"n", k}, {"Q", rep.q(m, k)}, {"P", rep.p(m, k)},
                       {"degenerate", static_cast<bool>(rep.degenerate(m - 1, k - 1))}});
      }
    }
    nlohmann::json doc{{"rows", arr}, {"S", rep.s_value}};
    os << doc.dump(2) << '\n';
    return;
  }
  os << "m,n,Q,P\n";
  for (int m = 1; m <= n; ++m) {
    for (int k = m; k <= n; ++k) {
      os << m << ',' << k << ',' << format_real(rep.q(m, k)) << ',' << format_real(rep.p(m, k))
         << '\n';
    }
  }
  os << "# S=" << format_real(rep.s_value) << '\n';
}

inline void write_negativity(std::ostream& os, const PsiFamily& family, double value,
                             Format format) {
  if (format == Format::json) {
    nlohmann::json doc{{"theta", family.theta}, {"phi", family.phi}, {"negativity", value}};
    os << doc.dump(2) << '\n';
    return;
  }
  os << "theta,phi,negativity\n"
     << format_real(family.theta) << ',' << format_real(family.phi) << ',' << format_real(value)
     << '\n';
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Angle grids used by the figure sweeps.
inline std::vector<double> fig1_thetas() {
  std::vector<double> out;
  for (int i = 0; i <= 40; ++i) out.push_back(std::numbers::pi / 2 * i / 40.0);
  return out;
}

inline std::vector<double> quarter_pi_phis() {
  std::vector<double> out;
  for (int i = 0; i <= 4; ++i) out.push_back(std::numbers::pi * i / 4.0);
  return out;
}

inline std::vector<FamilySetting> fig2_settings() {
  std::vector<FamilySetting> out;
  for (double theta : {std::numbers::pi / 8, std::numbers::pi / 4}) {
    for (double phi : quarter_pi_phis()) out.push_back({theta, phi});
  }
  return out;
}

namespace detail {

inline int report_spot_check(const SweepResult& result, std::ostream& err) {
  const auto& sc = result.spot_check;
  err << "oracle spot check: " << sc.rows_checked << " rows, max |dS| = "
      << format_real(sc.max_discrepancy) << '\n';
  if (sc.max_discrepancy > kSpotCheckTolerance) {
    const auto& row = result.rows[sc.worst_row];
    err << "FAIL: oracle disagrees with closed form at N=" << row.n_cavities
        << " theta=" << format_real(row.theta) << " phi=" << format_real(row.phi)
        << " t=" << format_real(row.t_at_max) << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

inline int run_verify(const RunConfig& cfg, std::ostream& os) {
  const std::vector<int> sizes = cfg.n_given ? std::vector<int>{cfg.n} : std::vector<int>{1, 2, 4, 8};
  const VerifyReport rep = run_verification(cfg.seed, 200, sizes, cfg.omega, cfg.hopping);
  os << "seed=" << rep.seed << '\n';
  for (const auto& c : rep.checks) {
    os << (c.passed() ? "PASS " : "FAIL ") << c.name << ": max=" << format_real(c.worst)
       << " tol=" << format_real(c.tolerance);
    if (!c.passed()) os << " worst case: " << c.worst_case;
    os << '\n';
  }
  os << (rep.passed() ? "verify: all checks passed" : "verify: FAILED") << '\n';
  return rep.passed() ? kExitOk : kExitNumeric;
}

inline int dispatch(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const ArrayModel model = cfg.model();
  switch (cfg.command) {
    case Command::propagator:
      write_propagator(os, propagator(model, cfg.t), cfg.format);
      return kExitOk;
    case Command::evolve:
      write_state(os, evolve_oracle(model, psi_state(cfg.family(), cfg.n), cfg.t), cfg.format);
      return kExitOk;
    case Command::correlations: {
      const TwoPhotonState state = evolve_oracle(model, psi_state(cfg.family(), cfg.n), cfg.t);
      write_correlations(os, report_from_state(state), cfg.format);
      return kExitOk;
    }
    case Command::max_deloc: {
      const PsiFamily family = cfg.family();
      const MaxResult m = max_delocalization(model, family, cfg.grid());
      const SweepRow row{cfg.n, family.r, family.s, family.theta, family.phi,
                         m.s_max, m.t_at_max, negativity(family).value};
      write_sweep(os, {row}, cfg.format);
      return kExitOk;
    }
    case Command::fig1: {
      const auto thetas = cfg.theta_given ? std::vector<double>{cfg.theta} : fig1_thetas();
      const auto phis = cfg.phi_given ? std::vector<double>{cfg.phi} : quarter_pi_phis();
      const SweepResult result = theta_phi_sweep(model, thetas, phis, cfg.grid());
      write_sweep(os, result.rows, cfg.format);
      return report_spot_check(result, err);
    }
    case Command::fig2: {
      const int n_max = cfg.n_given ? cfg.n : 16;
      std::vector<ArrayModel> models;
      for (int n = 2; n <= n_max; ++n) models.push_back({n, cfg.omega, cfg.hopping});
      const auto settings = (cfg.theta_given || cfg.phi_given)
                                ? std::vector<FamilySetting>{{cfg.theta, cfg.phi}}
                                : fig2_settings();
      const SweepResult result = n_sweep(models, settings, cfg.grid());
      write_sweep(os, result.rows, cfg.format);
      return report_spot_check(result, err);
    }
    case Command::negativity: {
      const PsiFamily family = cfg.family();
      write_negativity(os, family, negativity(family).value, cfg.format);
      return kExitOk;
    }
    case Command::verify:
      return run_verify(cfg, os);
  }
  return kExitUsage;
}

}  // namespace detail

/// Runs one command. Output is rendered in the classic locale and written to
/// --out (binary mode, LF endings) or to `out`.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ostringstream buffer;
  buffer.imbue(std::locale::classic());
  const int status = detail::dispatch(cfg, buffer, err);
  if (cfg.out.empty()) {
    out << buffer.str();
    return status;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) {
    err << "--out: cannot open '" << cfg.out << "'\n";
    return kExitUsage;
  }
  file << buffer.str();
  return status;
}

/// Full entry point: parse, run, map exceptions to exit statuses.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    return run(cfg, out, err);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace cavitywalk::cli

#endif  // CAVITYWALK_CLI_HPP
