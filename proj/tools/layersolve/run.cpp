#include "layersolve/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "layersolve/analysis.hpp"
#include "layersolve/error.hpp"
#include "layersolve/registry.hpp"
#include "layersolve/report_io.hpp"

namespace layersolve::app {

namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Converge: return "converge";
    case Command::Temporal: return "temporal";
    case Command::DumpMesh: return "dump-mesh";
    case Command::DumpSolution: return "dump-solution";
    case Command::PlotData: return "plot-data";
  }
  return "unknown";
}

namespace {

Error config_error(const std::string& message) { return Error(ErrorCode::ConfigError, message); }

const std::map<std::string, ThetaVariant>& variant_names() {
  static const std::map<std::string, ThetaVariant> names{
      {"symmetric", ThetaVariant::Symmetric},
      {"asymmetric", ThetaVariant::Asymmetric},
      {"case2-experimental", ThetaVariant::CaseTwoExperimental},
  };
  return names;
}

const std::map<std::string, CheckMode>& check_names() {
  static const std::map<std::string, CheckMode> names{
      {"strict", CheckMode::Strict}, {"warn", CheckMode::Warn}, {"off", CheckMode::Off}};
  return names;
}

std::string run_tag(const RunConfig& c) {
  return c.example + "_eps" + format_parameter(c.epsilon) + "_mu" + format_parameter(c.mu) +
         "_N" + std::to_string(c.n) + "_M" + std::to_string(c.time_steps());
}

fs::path output_dir(const RunConfig& c) {
  const fs::path dir = c.out.value_or(fs::path("."));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "output directory " + dir.string() + " is not usable");
  }
  return dir;
}

void emit(const RunConfig& c, const std::string& content, std::ostream& out) {
  if (c.out) {
    write_file_atomic(*c.out, content);
  } else {
    out << content;
  }
}

ProblemSpec spec_for(const RunConfig& c, double mu) {
  return make_example(c.example, PerturbationParams{c.epsilon, mu});
}

DiscreteSolution solve_config(const RunConfig& c) {
  const ProblemSpec spec = spec_for(c, c.mu);
  const ErrorContext where{.n = c.n, .m = c.time_steps()};
  try {
    validate(spec).throw_if_rejected();
    const SpatialMesh mesh = layer_mesh_for(spec, c.n, c.variant);
    return march(spec, mesh, TimeGrid(c.time_steps(), spec.final_time), CheckPolicy{c.checks});
  } catch (const Error& e) {
    throw e.with_context(where);
  }
}

void print_diagnostics(const MarchDiagnostics& d, std::ostream& out) {
  out << "systems checked: " << d.systems_checked
      << ", m-matrix violations: " << d.m_matrix_violations
      << ", residual failures: " << d.residual_failures
      << ", max relative residual: " << d.max_relative_residual << '\n';
  for (const auto& w : d.warnings) out << "warning: " << w << '\n';
}

void do_solve(const RunConfig& c, std::ostream& out) {
  const DiscreteSolution sol = solve_config(c);
  const ProblemSpec spec = spec_for(c, c.mu);
  const AuditReport audit = stability_audit(sol, spec);
  const fs::path path = output_dir(c) / ("solution_" + run_tag(c) + ".csv");
  write_file_atomic(path, render_solution_csv(sol));
  out << "wrote " << path.string() << '\n';
  out << "max |U| = " << sol.max_abs() << ", stability bound = " << audit.bound
      << (audit.passed ? " (pass)" : " (FAIL)") << '\n';
  print_diagnostics(sol.diagnostics(), out);
}

void do_converge(const RunConfig& c, std::ostream& out) {
  const std::vector<double> mus = c.mu_list.empty() ? std::vector<double>{c.mu} : c.mu_list;
  std::vector<StudyResult> results(mus.size());
  const std::size_t outer = std::min(c.threads, mus.size());
  const std::size_t inner = std::max<std::size_t>(1, c.threads / std::max<std::size_t>(1, outer));
  parallel_for(mus.size(), outer, [&](std::size_t k) {
    StudyOptions options;
    options.base_n = c.n;
    options.base_m = c.time_steps();
    options.levels = c.levels;
    options.variant = c.variant;
    options.checks = CheckPolicy{c.checks};
    options.threads = inner;
    results[k] = run_convergence_study(spec_for(c, mus[k]), options);
  });

  const fs::path dir = output_dir(c);
  std::vector<ConvergenceReport> reports;
  for (const auto& r : results) {
    const fs::path path = dir / report_filename(r.report.params.epsilon, r.report.params.mu);
    write_file_atomic(path, render_report_csv(r.report));
    out << "wrote " << path.string() << '\n';
    reports.push_back(r.report);
  }
  const std::string table = render_table(reports);
  const fs::path table_path = dir / ("table_" + c.example + "_eps" + format_parameter(c.epsilon) + ".txt");
  write_file_atomic(table_path, table);
  out << "wrote " << table_path.string() << "\n\n" << table;

  for (const auto& r : results) {
    std::size_t violations = 0;
    std::size_t residual_failures = 0;
    bool audits = true;
    for (const auto& run : r.runs) {
      violations += run.march.m_matrix_violations;
      residual_failures += run.march.residual_failures;
      audits = audits && run.audit.passed;
    }
    out << "\nmu = " << format_parameter(r.report.params.mu) << ": regime "
        << to_string(r.report.regime.regime) << ", rho = " << r.report.regime.rho
        << ", theta1 = " << r.layer.theta1 << ", theta2 = " << r.layer.theta2
        << "; m-matrix violations " << violations << ", residual failures "
        << residual_failures << ", stability audits " << (audits ? "pass" : "FAIL") << '\n';
    for (std::size_t l = 0; l < r.differences.size(); ++l) {
      const auto& diff = r.differences[l];
      out << "  N=" << r.report.levels[l].n << ": max difference at x = " << diff.x
          << ", t = " << diff.t << '\n';
    }
  }
}

void do_temporal(const RunConfig& c, std::ostream& out) {
  const TemporalReport report = temporal_order_study(
      sine_decay_problem(), sine_decay_solution(), c.n, c.m_list, CheckPolicy{c.checks}, c.threads);
  const fs::path path = output_dir(c) / ("temporal_N" + std::to_string(c.n) + ".csv");
  write_file_atomic(path, render_temporal_csv(report));
  out << "wrote " << path.string() << '\n';
  out << "mesh: " << (report.uniform_mesh ? "piecewise uniform" : "layer adapted")
      << ", spatial floor " << report.spatial_floor << " (M = " << report.reference_m << ")\n";
  out << std::setw(6) << "M" << std::setw(14) << "error" << std::setw(14) << "ratio"
      << std::setw(14) << "order" << '\n';
  for (const auto& rec : report.records) {
    out << std::setw(6) << rec.m << std::setw(14) << rec.error;
    if (rec.ratio) {
      out << std::setw(14) << *rec.ratio << std::setw(14) << *rec.order
          << (rec.above_floor ? "" : "  (spatial floor)");
    }
    out << '\n';
  }
}

void do_dump_mesh(const RunConfig& c, std::ostream& out) {
  const ProblemSpec spec = spec_for(c, c.mu);
  validate(spec).throw_if_rejected();
  emit(c, render_mesh_dump(layer_mesh_for(spec, c.n, c.variant)), out);
}

void do_dump_solution(const RunConfig& c, std::ostream& out) {
  emit(c, render_solution_csv(solve_config(c)), out);
}

void do_plot_data(const RunConfig& c, std::ostream& out) {
  const DiscreteSolution sol = solve_config(c);
  const fs::path path = output_dir(c) / ("plot_" + run_tag(c) + ".dat");
  write_file_atomic(path, render_plot_data(sol, c.plot_stride));
  out << "wrote " << path.string() << '\n';
}

}  // namespace

std::size_t threads_from_environment() {
  const char* raw = std::getenv("LAYERSOLVE_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  const std::string value(raw);
  std::size_t pos = 0;
  unsigned long parsed = 0;
  try {
    parsed = std::stoul(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size() || parsed == 0 || value.front() == '-') {
    throw config_error("LAYERSOLVE_THREADS must be a positive integer, got '" + value + "'");
  }
  return parsed;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig config;
  CLI::App app{"Upwind Crank-Nicolson solver for two-parameter singularly perturbed parabolic "
               "problems with a discontinuous convection coefficient",
               "layersolve"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  const std::vector<std::pair<Command, std::string>> commands{
      {Command::Solve, "Solve one problem and write the solution CSV"},
      {Command::Converge, "Double-mesh convergence study; writes report CSVs and a table"},
      {Command::Temporal, "Temporal order study on a manufactured smooth problem"},
      {Command::DumpMesh, "Print the layer-adapted mesh"},
      {Command::DumpSolution, "Print the solution as t,x,u CSV"},
      {Command::PlotData, "Write x u pairs per time slice for plotting"},
  };
  std::vector<std::pair<Command, CLI::App*>> subs;
  for (const auto& [cmd, help] : commands) subs.emplace_back(cmd, app.add_subcommand(to_string(cmd), help));

  std::string variant = "symmetric";
  std::string checks = "warn";
  std::string out_path;
  std::size_t m = 0;
  std::vector<std::size_t> m_list;

  app.add_option("--example", config.example, "Registered problem")->capture_default_str();
  app.add_option("--epsilon", config.epsilon, "Diffusion parameter in (0,1]")->capture_default_str();
  app.add_option("--mu", config.mu, "Convection parameter in (0,1]")->capture_default_str();
  app.add_option("--mu-list", config.mu_list, "Comma-separated mu sweep for converge")
      ->delimiter(',');
  app.add_option("--N", config.n, "Spatial intervals (multiple of 8, at least 16)")
      ->capture_default_str();
  app.add_option("--M", m, "Time steps (defaults to N)");
  app.add_option("--m-list", m_list, "Comma-separated time step counts for temporal")
      ->delimiter(',');
  app.add_option("--levels", config.levels, "Report rows for converge (at least 2)")
      ->capture_default_str();
  app.add_option("--theta-variant", variant, "symmetric, asymmetric or case2-experimental")
      ->capture_default_str();
  app.add_option("--checks", checks, "strict, warn or off")->capture_default_str();
  app.add_option("--out", out_path, "Output directory, or output file for dump commands");
  app.add_option("--plot-stride", config.plot_stride, "Emit every k-th time level in plot data")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw config_error(e.what());
  }

  for (const auto& [cmd, sub] : subs) {
    if (sub->parsed()) config.command = cmd;
  }
  if (m != 0) config.m = m;
  if (!m_list.empty()) config.m_list = m_list;
  if (!out_path.empty()) config.out = out_path;

  const auto v = variant_names().find(variant);
  if (v == variant_names().end()) throw config_error("unknown theta variant '" + variant + "'");
  config.variant = v->second;
  const auto ch = check_names().find(checks);
  if (ch == check_names().end()) throw config_error("unknown check policy '" + checks + "'");
  config.checks = ch->second;
  if (app.get_option("--M")->count() > 0 && m == 0) throw config_error("M must be positive");

  config.threads = threads_from_environment();
  return config;
}

void check_config(const RunConfig& c) {
  const auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (c.n < 16 || c.n % 8 != 0) {
    throw config_error("N must be a multiple of 8 and at least 16, got " + std::to_string(c.n));
  }
  if (c.time_steps() == 0) throw config_error("M must be positive");
  if (!in_unit(c.epsilon)) throw config_error("epsilon must lie in (0,1]");
  if (!in_unit(c.mu)) throw config_error("mu must lie in (0,1]");
  for (double mu : c.mu_list) {
    if (!in_unit(mu)) throw config_error("every mu in --mu-list must lie in (0,1]");
  }
  if (c.command == Command::Converge && c.levels < 2) {
    throw config_error("converge needs at least 2 levels");
  }
  if (c.command == Command::Temporal) {
    if (c.m_list.size() < 2) throw config_error("temporal needs at least two time step counts");
    for (std::size_t m : c.m_list) {
      if (m == 0) throw config_error("time step counts must be positive");
    }
  } else {
    const auto keys = example_keys();
    if (std::ranges::find(keys, c.example) == keys.end()) {
      throw config_error("unknown example '" + c.example + "'");
    }
  }
  if (c.plot_stride == 0) throw config_error("plot stride must be positive");
  if (c.threads == 0) throw config_error("thread count must be positive");
}

void run(const RunConfig& c, std::ostream& out) {
  switch (c.command) {
    case Command::Solve: return do_solve(c, out);
    case Command::Converge: return do_converge(c, out);
    case Command::Temporal: return do_temporal(c, out);
    case Command::DumpMesh: return do_dump_mesh(c, out);
    case Command::DumpSolution: return do_dump_solution(c, out);
    case Command::PlotData: return do_plot_data(c, out);
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_args(argc, argv, out);
    if (!config) return 0;
    check_config(*config);
  } catch (const Error& e) {
    err << e.machine_line() << '\n';
    return 2;
  }
  try {
    run(*config, out);
  } catch (const Error& e) {
    err << e.machine_line() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << Error(ErrorCode::EvaluationFailure, e.what()).machine_line() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace layersolve::app
