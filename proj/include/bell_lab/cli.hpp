// SPDX-License-Identifier: Apache-2.0
//
// bell-lab: command-line front door. Parses flags and INI-style config
// files into an ExperimentConfig, runs one experiment, writes CSV, and
// prints a one-line machine-greppable summary (value, bound, verdict).
//
// Exit codes: 0 success, 1 usage or I/O error, 2 premise violation (a
// scientific outcome, not a bug: e.g. the anti-correlation premise fails
// for the model under audit).

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bell_lab/core.hpp"
#include "bell_lab/correlator.hpp"
#include "bell_lab/inequalities.hpp"
#include "bell_lab/models.hpp"
#include "bell_lab/search.hpp"

namespace bell_lab::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command {
  correlate,
  bell,
  chsh,
  audit_bell,
  audit_chsh,
  local_bound,
  optimize,
  sweep,
  mc_scan,
};

inline const char* to_string(Command c) {
  switch (c) {
    case Command::correlate: return "correlate";
    case Command::bell: return "bell";
    case Command::chsh: return "chsh";
    case Command::audit_bell: return "audit-bell";
    case Command::audit_chsh: return "audit-chsh";
    case Command::local_bound: return "local-bound";
    case Command::optimize: return "optimize";
    case Command::sweep: return "sweep";
    case Command::mc_scan: return "mc-scan";
  }
  return "?";
}

inline Command command_from_string(const std::string& name) {
  for (Command c : {Command::correlate, Command::bell, Command::chsh, Command::audit_bell,
                    Command::audit_chsh, Command::local_bound, Command::optimize, Command::sweep,
                    Command::mc_scan}) {
    if (name == to_string(c)) return c;
  }
  throw UsageError("unknown command '" + name +
                   "' (known: correlate, bell, chsh, audit-bell, audit-chsh, local-bound, "
                   "optimize, sweep, mc-scan)");
}

struct ExperimentConfig {
  Command command = Command::chsh;
  std::string model;  // empty where a command needs none (local-bound, optimize)
  std::vector<double> angles_deg;
  long long n_samples = 100000;
  std::uint64_t seed = 42;
  int quad_n_theta = 64;
  int quad_n_phi = 64;
  std::string output_path;  // defaults to "<command>.csv"
};

inline const char* usage_text() {
  return
      "usage: bell_lab <command> [flags]\n"
      "\n"
      "commands:\n"
      "  correlate    E(a,b) by quadrature/closed form and Monte Carlo   (2 angles)\n"
      "  bell         three-correlation inequality check                 (3 angles)\n"
      "  chsh         two-setting inequality check                       (4 angles)\n"
      "  audit-bell   residuals of every step of the derivation          (3 angles)\n"
      "  audit-chsh   residuals of every step of the derivation          (4 angles)\n"
      "  local-bound  enumerate deterministic strategies exactly         (3 or 4 angles)\n"
      "  optimize     refine angles to the maximal quantum violation     (4 angles, start)\n"
      "  sweep        violation landscape on a planar angle grid         (1 angle: grid step)\n"
      "  mc-scan      Monte Carlo error against sample count             (2 angles)\n"
      "\n"
      "flags:\n"
      "  --model NAME    sign_sphere | local_noise | quantum_singlet | signaling_demo\n"
      "  --angles LIST   comma-separated degrees, e.g. 0,90,45,135\n"
      "  --n N           Monte Carlo samples / optimizer evaluation budget (default 100000)\n"
      "  --seed S        master seed (default 42)\n"
      "  --quad NT,NP    sphere quadrature resolution (default 64,64)\n"
      "  --out PATH      CSV output path (default <command>.csv)\n"
      "  --config PATH   INI-style config file; explicit flags override it\n"
      "\n"
      "environment: BELL_LAB_WORKERS caps parallelism (0 or unset = automatic)\n";
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_double(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || !std::isfinite(value)) {
    throw UsageError(what + ": expected a number, got '" + text + "'");
  }
  return value;
}

inline long long parse_int(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const long long value = std::strtoll(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || text.empty()) {
    throw UsageError(what + ": expected an integer, got '" + text + "'");
  }
  return value;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  return parts;
}

inline std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

/// Raw key/value view of a config before validation; flags overlay file keys.
using KeyValues = std::map<std::string, std::string>;

inline KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file '" + path + "'");
  }
  static const char* kKnown[] = {"command", "model",  "angles_deg", "n_samples",
                                 "seed",    "quad",   "output_path"};
  KeyValues values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    values[key] = value;
  }
  return values;
}

inline std::vector<double> parse_angles(const std::string& text) {
  std::vector<double> angles;
  for (const std::string& part : split(text, ',')) {
    angles.push_back(parse_double(trim(part), "--angles"));
  }
  return angles;
}

inline std::size_t required_angle_arity(Command c) {
  switch (c) {
    case Command::correlate: return 2;
    case Command::bell: return 3;
    case Command::audit_bell: return 3;
    case Command::chsh: return 4;
    case Command::audit_chsh: return 4;
    case Command::optimize: return 4;
    default: return 0;  // validated per command below
  }
}

inline bool command_needs_model(Command c) {
  switch (c) {
    case Command::local_bound:
    case Command::optimize:
      return false;
    default:
      return true;
  }
}

}  // namespace detail

/// Builds a validated ExperimentConfig from command-line arguments. A
/// --config file supplies defaults; explicit flags win. Throws UsageError
/// with a message naming exactly what is wrong.
inline ExperimentConfig parse_config(const std::vector<std::string>& args) {
  detail::KeyValues file_values;
  detail::KeyValues flag_values;
  std::optional<std::string> positional_command;

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    auto take_value = [&](const char* flag) -> std::string {
      if (i + 1 >= args.size()) throw UsageError(std::string("missing value for ") + flag);
      return args[++i];
    };
    if (arg == "--config") {
      file_values = detail::load_config_file(take_value("--config"));
    } else if (arg == "--model") {
      flag_values["model"] = take_value("--model");
    } else if (arg == "--angles") {
      flag_values["angles_deg"] = take_value("--angles");
    } else if (arg == "--n") {
      flag_values["n_samples"] = take_value("--n");
    } else if (arg == "--seed") {
      flag_values["seed"] = take_value("--seed");
    } else if (arg == "--quad") {
      flag_values["quad"] = take_value("--quad");
    } else if (arg == "--out") {
      flag_values["output_path"] = take_value("--out");
    } else if (!arg.empty() && arg[0] == '-') {
      throw UsageError("unknown flag '" + arg + "'");
    } else if (!positional_command) {
      positional_command = arg;
    } else {
      throw UsageError("unexpected argument '" + arg + "'");
    }
  }

  auto lookup = [&](const std::string& key) -> std::optional<std::string> {
    if (auto it = flag_values.find(key); it != flag_values.end()) return it->second;
    if (auto it = file_values.find(key); it != file_values.end()) return it->second;
    return std::nullopt;
  };

  ExperimentConfig config;
  if (positional_command) {
    config.command = command_from_string(*positional_command);
  } else if (auto cmd = lookup("command")) {
    config.command = command_from_string(*cmd);
  } else {
    throw UsageError("no command given (and no 'command' key in the config file)");
  }

  if (auto model = lookup("model")) config.model = *model;
  if (auto angles = lookup("angles_deg")) config.angles_deg = detail::parse_angles(*angles);
  if (auto n = lookup("n_samples")) {
    config.n_samples = detail::parse_int(*n, "--n");
    if (config.n_samples < 1) throw UsageError("--n: must be at least 1");
  }
  if (auto seed = lookup("seed")) {
    config.seed = static_cast<std::uint64_t>(detail::parse_int(*seed, "--seed"));
  }
  if (auto quad = lookup("quad")) {
    const auto parts = detail::split(*quad, ',');
    if (parts.size() != 2) throw UsageError("--quad: expected NTHETA,NPHI");
    config.quad_n_theta = static_cast<int>(detail::parse_int(detail::trim(parts[0]), "--quad"));
    config.quad_n_phi = static_cast<int>(detail::parse_int(detail::trim(parts[1]), "--quad"));
  }
  if (auto out = lookup("output_path")) config.output_path = *out;
  if (config.output_path.empty()) {
    config.output_path = std::string(to_string(config.command)) + ".csv";
  }

  // Command-specific validation, before anything runs.
  if (detail::command_needs_model(config.command)) {
    if (config.model.empty()) {
      throw UsageError(std::string(to_string(config.command)) + ": --model is required");
    }
    try {
      make_builtin_model(config.model);
    } catch (const std::invalid_argument& error) {
      throw UsageError(error.what());
    }
  }
  const std::size_t arity = detail::required_angle_arity(config.command);
  if (arity > 0) {
    if (config.angles_deg.empty() && config.command == Command::optimize) {
      config.angles_deg = {0.0, 90.0, 45.0, 135.0};
    }
    if (config.angles_deg.size() != arity) {
      throw UsageError(std::string(to_string(config.command)) + ": expects " +
                       std::to_string(arity) + " angles, got " +
                       std::to_string(config.angles_deg.size()));
    }
  } else if (config.command == Command::local_bound) {
    if (config.angles_deg.empty()) config.angles_deg = {0.0, 90.0, 45.0, 135.0};
    if (config.angles_deg.size() != 3 && config.angles_deg.size() != 4) {
      throw UsageError("local-bound: expects 3 angles (three-axis layout) or 4 (chsh), got " +
                       std::to_string(config.angles_deg.size()));
    }
  } else if (config.command == Command::sweep) {
    if (config.angles_deg.empty()) config.angles_deg = {15.0};
    if (config.angles_deg.size() != 1) {
      throw UsageError("sweep: expects 1 angle (the grid step in degrees), got " +
                       std::to_string(config.angles_deg.size()));
    }
    if (!(config.angles_deg[0] > 0.0)) throw UsageError("sweep: grid step must be positive");
  } else if (config.command == Command::mc_scan) {
    if (config.angles_deg.size() != 2) {
      throw UsageError("mc-scan: expects 2 angles, got " +
                       std::to_string(config.angles_deg.size()));
    }
  }
  QuadratureSpec(config.quad_n_theta, config.quad_n_phi);  // validates, then discarded
  return config;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// Writes a table as CSV: optional '#' provenance comment, mandatory header
/// row, then data rows with reals at 9 significant digits, LF endings.
/// Row order is whatever the table holds, so identical tables give
/// byte-identical files.
inline void emit_csv(const Table& table, const std::string& path,
                     const std::string& provenance = "") {
  const bool labeled = !table.row_labels.empty();
  if (labeled && table.row_labels.size() != table.rows.size()) {
    throw std::logic_error("emit_csv: row_labels/rows size mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output file '" + path + "'");
  }
  if (!provenance.empty()) out << "# " << provenance << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out << ",";
    out << table.columns[i];
  }
  out << "\n";
  char buffer[64];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool first = true;
    if (labeled) {
      out << table.row_labels[r];
      first = false;
    }
    for (const double cell : table.rows[r]) {
      if (!first) out << ",";
      std::snprintf(buffer, sizeof(buffer), "%.9g", cell);
      out << buffer;
      first = false;
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("failed while writing output file '" + path + "'");
  }
}

// ---------------------------------------------------------------------------
// Experiment dispatch
// ---------------------------------------------------------------------------

namespace detail {

inline std::string provenance_line(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "bell-lab " << kVersion << " command=" << to_string(config.command);
  if (!config.model.empty()) out << " model=" << config.model;
  out << " seed=" << config.seed;
  return out.str();
}

inline std::vector<Axis> planar_axes(const std::vector<double>& angles_deg) {
  std::vector<Axis> axes;
  axes.reserve(angles_deg.size());
  for (const double deg : angles_deg) {
    axes.push_back(axis_from_planar_angle(deg_to_rad(deg)));
  }
  return axes;
}

inline double satisfied_tolerance(const CorrelationSource& source) {
  return source.is_quantum() || source.has_closed_form() ? kClosedFormTol : kQuadratureTol;
}

inline std::string format(const char* fmt, auto... values) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), fmt, values...);
  return std::string(buffer);
}

inline int run_correlate(const ExperimentConfig& config, const CorrelationSource& source,
                         const QuadratureSpec& quad) {
  const auto axes = planar_axes(config.angles_deg);
  const CorrelationEstimate exact = source.correlate(axes[0], axes[1], quad);
  const CorrelationEstimate mc = source.mc(axes[0], axes[1], config.n_samples, config.seed);

  Table table;
  table.columns = {"method", "theta_a_deg", "theta_b_deg", "value", "stderr", "n_samples"};
  for (const CorrelationEstimate* est : {&exact, &mc}) {
    table.row_labels.push_back(bell_lab::to_string(est->method()));
    table.rows.push_back({config.angles_deg[0], config.angles_deg[1], est->value(),
                          est->stderr_value(), static_cast<double>(est->n_samples())});
  }
  emit_csv(table, config.output_path, provenance_line(config));

  // NaN stderr (single-sample runs) gives no band to judge against.
  const bool ok = std::abs(exact.value()) <= 1.0 + kClosedFormTol &&
                  !(std::abs(mc.value()) > 1.0 + kMonteCarloSigmas * mc.stderr_value());
  std::cout << format("E = %.9g (%s), E_mc = %.9g (stderr %.3g, n %lld), bound |E| <= 1, %s\n",
                      exact.value(), bell_lab::to_string(exact.method()), mc.value(),
                      mc.stderr_value(), mc.n_samples(), ok ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline int run_bell(const ExperimentConfig& config, const CorrelationSource& source,
                    const QuadratureSpec& quad) {
  const auto axes = planar_axes(config.angles_deg);
  const double e_ab = source.correlate(axes[0], axes[1], quad).value();
  const double e_ac = source.correlate(axes[0], axes[2], quad).value();
  const double e_bc = source.correlate(axes[1], axes[2], quad).value();
  const BellReport report = bell_functional(e_ab, e_ac, e_bc, satisfied_tolerance(source));

  Table table;
  table.columns = {"theta_a_deg", "theta_b_deg", "theta_c_deg", "e_ab", "e_ac", "e_bc",
                   "lhs", "rhs", "margin", "satisfied"};
  table.rows.push_back({config.angles_deg[0], config.angles_deg[1], config.angles_deg[2], e_ab,
                        e_ac, e_bc, report.lhs, report.rhs, report.margin,
                        report.satisfied ? 1.0 : 0.0});
  emit_csv(table, config.output_path, provenance_line(config));

  std::cout << format("LHS = %.6f, RHS = %.6f (bound), margin = %.6f, %s\n", report.lhs,
                      report.rhs, report.margin, report.satisfied ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline int run_chsh(const ExperimentConfig& config, const CorrelationSource& source,
                    const QuadratureSpec& quad) {
  const auto axes = planar_axes(config.angles_deg);  // a, a', b, b'
  const double e_ab = source.correlate(axes[0], axes[2], quad).value();
  const double e_ab2 = source.correlate(axes[0], axes[3], quad).value();
  const double e_a2b = source.correlate(axes[1], axes[2], quad).value();
  const double e_a2b2 = source.correlate(axes[1], axes[3], quad).value();
  const ChshReport report =
      chsh_functional(e_ab, e_ab2, e_a2b, e_a2b2, satisfied_tolerance(source));

  Table table;
  table.columns = {"theta_a_deg", "theta_a2_deg", "theta_b_deg", "theta_b2_deg",
                   "e_ab", "e_ab2", "e_a2b", "e_a2b2", "s_value", "margin", "satisfied"};
  table.rows.push_back({config.angles_deg[0], config.angles_deg[1], config.angles_deg[2],
                        config.angles_deg[3], e_ab, e_ab2, e_a2b, e_a2b2, report.s_value,
                        report.margin, report.satisfied ? 1.0 : 0.0});
  emit_csv(table, config.output_path, provenance_line(config));

  std::cout << format("S = %.6f, %s (bound 2)\n", report.s_value,
                      report.satisfied ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline Table audit_to_table(const DerivationAudit& audit) {
  Table table;
  table.columns = {"step", "value"};
  for (std::size_t i = 0; i < audit.step_names.size(); ++i) {
    table.row_labels.push_back(audit.step_names[i]);
    table.rows.push_back({audit.step_residuals[i]});
  }
  table.row_labels.push_back("four_term_value");
  table.rows.push_back({audit.four_term_value});
  table.row_labels.push_back("max_residual");
  table.rows.push_back({audit.max_residual});
  return table;
}

inline int run_audit_bell(const ExperimentConfig& config, const QuadratureSpec& quad) {
  const AnyModel any = make_builtin_model(config.model);
  DeterministicLocalModel model = [&]() -> DeterministicLocalModel {
    if (const auto* det = std::get_if<DeterministicLocalModel>(&any)) return *det;
    if (const auto* sig = std::get_if<SignalingReferenceModel>(&any)) {
      return signaling_local_view(*sig, axis_from_planar_angle(0.0));
    }
    throw UsageError("audit-bell: model '" + config.model +
                     "' is not deterministic; try sign_sphere or signaling_demo");
  }();

  const auto axes = planar_axes(config.angles_deg);
  const DerivationAudit audit = audit_bell_derivation(model, axes[0], axes[1], axes[2], quad);
  emit_csv(audit_to_table(audit), config.output_path, provenance_line(config));

  const auto nodes = quadrature_nodes_for(model.dist, quad);
  const BellReport report = bell_functional(
      correlation_on_nodes(model, axes[0], axes[1], nodes).value(),
      correlation_on_nodes(model, axes[0], axes[2], nodes).value(),
      correlation_on_nodes(model, axes[1], axes[2], nodes).value(), kQuadratureTol);
  const bool ok = audit.max_residual <= kClosedFormTol && report.satisfied;
  std::cout << format(
      "audit-bell: max residual = %.3g (bound 1e-9), LHS = %.6f, RHS = %.6f, %s\n",
      audit.max_residual, report.lhs, report.rhs, ok ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline int run_audit_chsh(const ExperimentConfig& config, const QuadratureSpec& quad) {
  const AnyModel any = make_builtin_model(config.model);
  StochasticLocalModel model = [&]() -> StochasticLocalModel {
    if (const auto* sto = std::get_if<StochasticLocalModel>(&any)) return *sto;
    if (const auto* det = std::get_if<DeterministicLocalModel>(&any)) {
      return lift_deterministic(*det);
    }
    throw UsageError("audit-chsh: model '" + config.model +
                     "' has no local probability tables; try sign_sphere or local_noise");
  }();

  const auto axes = planar_axes(config.angles_deg);  // a, a', b, b'
  const DerivationAudit audit =
      audit_chsh_derivation(model, axes[0], axes[1], axes[2], axes[3], quad);
  emit_csv(audit_to_table(audit), config.output_path, provenance_line(config));

  const auto nodes = quadrature_nodes_for(model.dist, quad);
  const ChshReport report = chsh_functional(
      correlation_on_nodes(model, axes[0], axes[2], nodes).value(),
      correlation_on_nodes(model, axes[0], axes[3], nodes).value(),
      correlation_on_nodes(model, axes[1], axes[2], nodes).value(),
      correlation_on_nodes(model, axes[1], axes[3], nodes).value(), kQuadratureTol);
  const bool ok = audit.max_residual <= kClosedFormTol && report.satisfied;
  std::cout << format("audit-chsh: max residual = %.3g (bound 1e-9), S = %.6f, %s (bound 2)\n",
                      audit.max_residual, report.s_value, ok ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline int run_local_bound(const ExperimentConfig& config) {
  const auto axes = planar_axes(config.angles_deg);
  const FunctionalKind kind =
      config.angles_deg.size() == 3 ? FunctionalKind::bell : FunctionalKind::chsh;
  ScenarioSpec scenario;
  if (kind == FunctionalKind::chsh) {
    scenario.alice_settings = {axes[0], axes[1]};
    scenario.bob_settings = {axes[2], axes[3]};
  } else {
    scenario.alice_settings = axes;
    scenario.bob_settings = axes;
  }
  const LocalBoundResult result = enumerate_local_bound(scenario, kind);
  const double bound = kind == FunctionalKind::chsh ? 2.0 : 1.0;

  Table table;
  table.columns = {"max_value", "n_strategies"};
  std::vector<double> row{result.max_value, static_cast<double>(result.n_strategies)};
  for (std::size_t i = 0; i < result.argmax.alice_values.size(); ++i) {
    table.columns.push_back("alice_" + std::to_string(i));
    row.push_back(result.argmax.alice_values[i]);
  }
  for (std::size_t i = 0; i < result.argmax.bob_values.size(); ++i) {
    table.columns.push_back("bob_" + std::to_string(i));
    row.push_back(result.argmax.bob_values[i]);
  }
  table.rows.push_back(row);
  emit_csv(table, config.output_path, provenance_line(config));

  std::cout << format("local bound = %.6g over %zu strategies (bound %.6g), %s\n",
                      result.max_value, result.n_strategies, bound,
                      result.max_value <= bound + kClosedFormTol ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline int run_optimize(const ExperimentConfig& config) {
  const auto axes = planar_axes(config.angles_deg);
  ScenarioSpec initial{{axes[0], axes[1]}, {axes[2], axes[3]}};
  const OptimizeResult result = optimize_quantum_chsh(initial, config.n_samples);

  auto norm_deg = [](const Axis& axis) {
    double deg = rad_to_deg(std::atan2(axis.x(), axis.z()));
    deg = std::fmod(deg, 360.0);
    if (deg < 0.0) deg += 360.0;
    return deg;
  };
  const double a = norm_deg(result.settings.alice_settings[0]);
  const double a2 = norm_deg(result.settings.alice_settings[1]);
  const double b = norm_deg(result.settings.bob_settings[0]);
  const double b2 = norm_deg(result.settings.bob_settings[1]);

  Table table;
  table.columns = {"theta_a_deg", "theta_a2_deg", "theta_b_deg", "theta_b2_deg",
                   "s_value", "converged", "evaluations"};
  table.rows.push_back({a, a2, b, b2, result.s_value, result.converged ? 1.0 : 0.0,
                        static_cast<double>(result.evaluations)});
  emit_csv(table, config.output_path, provenance_line(config));

  std::cout << format(
      "S = %.8f at (%.3f, %.3f, %.3f, %.3f) deg, %s (bound 2), converged=%s\n", result.s_value,
      a, a2, b, b2, result.s_value <= 2.0 + kClosedFormTol ? "SATISFIED" : "VIOLATED",
      result.converged ? "yes" : "no");
  return 0;
}

inline int run_sweep(const ExperimentConfig& config, const CorrelationSource& source,
                     const QuadratureSpec& quad) {
  const double step = deg_to_rad(config.angles_deg[0]);
  const Table table = angle_sweep(FunctionalKind::chsh, source, step, quad);
  emit_csv(table, config.output_path, provenance_line(config));

  const std::size_t s_col = table.column_index("s_value");
  std::size_t best = 0;
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    if (table.rows[r][s_col] > table.rows[best][s_col]) best = r;
  }
  const auto& row = table.rows[best];
  std::cout << format(
      "sweep: %zu rows, max S = %.6f at a'=%g b=%g b'=%g deg, %s (bound 2)\n",
      table.rows.size(), row[s_col], row[1], row[2], row[3],
      row[s_col] <= 2.0 + kClosedFormTol ? "SATISFIED" : "VIOLATED");
  return 0;
}

inline int run_mc_scan(const ExperimentConfig& config, const CorrelationSource& source) {
  const auto axes = planar_axes(config.angles_deg);
  std::vector<long long> n_list;
  for (long long n = 1; n <= config.n_samples; n *= 4) n_list.push_back(n);
  if (n_list.empty() || n_list.back() != config.n_samples) n_list.push_back(config.n_samples);

  const Table table = source.convergence_scan(axes[0], axes[1], n_list, config.seed);
  emit_csv(table, config.output_path, provenance_line(config));

  const auto& last = table.rows.back();
  const double err = last[1];
  const double band = kMonteCarloSigmas * last[2];
  const bool ok = !(err > band);  // NaN stderr (n = 1) counts as satisfied
  std::cout << format("mc-scan: n = %lld, |error| = %.3g, bound 5*stderr = %.3g, %s\n",
                      static_cast<long long>(last[0]), err, band,
                      ok ? "SATISFIED" : "VIOLATED");
  return 0;
}

}  // namespace detail

/// Runs one experiment. Returns the process exit status: 0 success, 1 usage
/// or I/O error, 2 premise violation.
inline int run(const ExperimentConfig& config) {
  try {
    const QuadratureSpec quad(config.quad_n_theta, config.quad_n_phi);
    switch (config.command) {
      case Command::local_bound:
        return detail::run_local_bound(config);
      case Command::optimize:
        return detail::run_optimize(config);
      case Command::audit_bell:
        return detail::run_audit_bell(config, quad);
      case Command::audit_chsh:
        return detail::run_audit_chsh(config, quad);
      default:
        break;
    }
    const CorrelationSource source = CorrelationSource::from_any(make_builtin_model(config.model));
    switch (config.command) {
      case Command::correlate:
        return detail::run_correlate(config, source, quad);
      case Command::bell:
        return detail::run_bell(config, source, quad);
      case Command::chsh:
        return detail::run_chsh(config, source, quad);
      case Command::sweep:
        return detail::run_sweep(config, source, quad);
      case Command::mc_scan:
        return detail::run_mc_scan(config, source);
      default:
        break;
    }
    throw std::logic_error("run: unhandled command");
  } catch (const PremiseViolationError& error) {
    std::cout << "PREMISE VIOLATED: " << error.what() << "\n";
    return 2;
  } catch (const UsageError& error) {
    std::cerr << "usage error: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}

/// parse + run, the whole program behind main().
inline int run_main(const std::vector<std::string>& args) {
  if (args.empty()) {
    std::cerr << usage_text();
    return 1;
  }
  if (args[0] == "--help" || args[0] == "-h") {
    std::cout << usage_text();
    return 0;
  }
  try {
    return run(parse_config(args));
  } catch (const UsageError& error) {
    std::cerr << "usage error: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
}

}  // namespace bell_lab::cli
