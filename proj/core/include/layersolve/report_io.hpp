#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "layersolve/analysis.hpp"
#include "layersolve/mesh.hpp"
#include "layersolve/solver.hpp"

namespace layersolve {

/// 17 significant digits, enough to read back the same double.
std::string format_exact(double v);

/// `N,M,E,R` with one row per level; R is empty when absent.
std::string render_report_csv(const ConvergenceReport& report);

/// Inverse of render_report_csv for the level rows. Throws IoError on
/// malformed input.
std::vector<LevelRecord> parse_report_csv(std::string_view text);

/// Convergence table: one E row and one R row per report, one column per N.
/// E has 6 significant digits, R 4 decimals, and a missing R shows as "—".
std::string render_table(const std::vector<ConvergenceReport>& reports);

/// Compact rendering of a parameter for file names: 1e-08 -> "1e-8".
std::string format_parameter(double v);

/// report_eps1e-8_mu1e-6.csv
std::string report_filename(double epsilon, double mu);

/// Header `# N= theta1= theta2= tau1= tau2= tau3= tau4=`, then one line per
/// point: `index x h segment`.
std::string render_mesh_dump(const SpatialMesh& mesh);

/// `t,x,u`, row-major over (j, i).
std::string render_solution_csv(const DiscreteSolution& sol);

/// One block per time slice, `# t=<t>` followed by `x u` lines, blocks
/// separated by a blank line. Every `stride`-th level is emitted, and the
/// final level always is.
std::string render_plot_data(const DiscreteSolution& sol, std::size_t stride = 1);

/// `M,error,temporal_error,ratio,order,temporal_ratio,above_floor`
std::string render_temporal_csv(const TemporalReport& report);

/// Writes to a sibling temporary file and renames it into place.
/// Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace layersolve
