#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "layersolve/mesh.hpp"
#include "layersolve/solver.hpp"

namespace layersolve::app {

enum class Command { Solve, Converge, Temporal, DumpMesh, DumpSolution, PlotData };

std::string to_string(Command c);

struct RunConfig {
  Command command = Command::Solve;
  std::string example = "example1";
  double epsilon = 1e-8;
  double mu = 1e-6;
  /// Overrides mu for converge when non-empty.
  std::vector<double> mu_list;
  std::size_t n = 64;
  /// Defaults to n.
  std::optional<std::size_t> m;
  std::size_t levels = 4;
  /// Time step counts for the temporal study.
  std::vector<std::size_t> m_list{4, 8, 16, 32};
  ThetaVariant variant = ThetaVariant::Symmetric;
  CheckMode checks = CheckMode::Warn;
  /// Output directory for solve, converge, temporal and plot-data; output
  /// file for dump-mesh and dump-solution (stdout when unset).
  std::optional<std::filesystem::path> out;
  /// Every stride-th time level in plot data.
  std::size_t plot_stride = 1;
  std::size_t threads = 1;

  std::size_t time_steps() const { return m.value_or(n); }
};

/// Parses the command line (argv[0] is the program name). Throws Error with
/// ConfigError for invalid input. Returns nullopt after printing help.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Worker count from LAYERSOLVE_THREADS; 1 when unset. Throws ConfigError
/// for a value that is not a positive integer.
std::size_t threads_from_environment();

/// Throws ConfigError describing the first invalid field.
void check_config(const RunConfig& config);

/// Executes a checked configuration. Progress and summaries go to `out`.
void run(const RunConfig& config, std::ostream& out);

/// parse_args + check_config + run with error reporting: returns 0 on
/// success, 2 for configuration errors and 1 for failures during the run,
/// after writing the error's machine line to `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace layersolve::app
