#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "layersolve/mesh.hpp"
#include "layersolve/problem.hpp"
#include "layersolve/solver.hpp"

namespace layersolve {

struct DoubleMeshError {
  double error = 0.0;
  /// Coarse indices and coordinates of the largest difference.
  std::size_t i = 0;
  std::size_t j = 0;
  double x = 0.0;
  double t = 0.0;
};

/// E = max_{i,j} |fine(2j, 2i) - coarse(j, i)|. Throws MeshMismatch unless
/// fine.x(2i) == coarse.x(i) bit for bit and fine has twice the time steps.
DoubleMeshError double_mesh_error(const DiscreteSolution& coarse, const DiscreteSolution& fine);

/// log2(coarse / fine), absent when either error is zero or not finite.
std::optional<double> convergence_order(double coarse_error, double fine_error);

struct LevelRecord {
  std::size_t n = 0;
  std::size_t m = 0;
  double error = 0.0;
  std::optional<double> order;

  bool operator==(const LevelRecord&) const = default;
};

struct ConvergenceReport {
  std::vector<LevelRecord> levels;
  RegimeConstants regime;
  PerturbationParams params;
};

struct StudyOptions {
  std::size_t base_n = 64;
  std::size_t base_m = 64;
  /// Number of report rows; levels + 1 solutions are computed.
  std::size_t levels = 4;
  ThetaVariant variant = ThetaVariant::Symmetric;
  CheckPolicy checks;
  /// Concurrent marches; 0 means hardware concurrency.
  std::size_t threads = 1;
};

struct RunDiagnostics {
  std::size_t n = 0;
  std::size_t m = 0;
  MarchDiagnostics march;
  AuditReport audit;
};

struct StudyResult {
  ConvergenceReport report;
  /// Per report row, where E was attained.
  std::vector<DoubleMeshError> differences;
  /// Per computed solution, coarsest first.
  std::vector<RunDiagnostics> runs;
  LayerParams layer;
  TransitionPoints tau;
};

/// Layer-adapted mesh for the spec's regime.
SpatialMesh layer_mesh_for(const ProblemSpec& spec, std::size_t n,
                           ThetaVariant variant = ThetaVariant::Symmetric);

/// Level l runs on (base_n 2^l, base_m 2^l) with the level l + 1 mesh
/// obtained by bisecting the level l mesh. Row l holds E from levels l and
/// l + 1 and R from rows l and l + 1; the last row has no R.
StudyResult run_convergence_study(const ProblemSpec& spec, const StudyOptions& options);

ConvergenceReport convergence_study(const ProblemSpec& spec, const StudyOptions& options);

struct ManufacturedSolution {
  std::function<double(double, double)> u;
  std::function<double(double, double)> u_x;
  std::function<double(double, double)> u_xx;
  std::function<double(double, double)> u_t;
};

/// Spec whose forcing and data reproduce `exact`: f = eps u_xx + mu a u_x -
/// b u - c u_t branch by branch, p = u(0,t), r = u(1,t), q = u(x,0).
ProblemSpec manufactured_problem(const ManufacturedSolution& exact, PiecewiseField a, Field b,
                                 Field c, PerturbationParams params, double d = 0.5,
                                 double final_time = 1.0);

/// u = e^{-t} sin(pi x).
ManufacturedSolution sine_decay_solution();

/// a = -1 left of 0.5 and +1 right, b = c = 1, eps = mu = 1, exact
/// solution sine_decay_solution().
ProblemSpec sine_decay_problem();

/// max |eps u_xx + mu a u_x - b u - c u_t - f| over a sample grid, each
/// branch evaluated on its own closed side.
double manufactured_residual(const ProblemSpec& spec, const ManufacturedSolution& exact,
                             std::size_t sample_density = 101);

inline constexpr double kManufacturedTolerance = 1e-8;

struct TemporalRecord {
  std::size_t m = 0;
  /// max_{i,j} |U(j,i) - u(x_i,t_j)|
  double error = 0.0;
  /// max_{i,j} |U(j,i) - U_ref(j,i)| against a run with many more steps on
  /// the same mesh; isolates the time discretization error.
  double temporal_error = 0.0;
  /// error / next error and its log2; absent on the last record.
  std::optional<double> ratio;
  std::optional<double> order;
  std::optional<double> temporal_ratio;
  /// Both this and the next error are clearly above the spatial floor.
  bool above_floor = false;
};

struct TemporalReport {
  std::size_t n = 0;
  std::size_t reference_m = 0;
  /// Error of the reference run against the exact solution.
  double spatial_floor = 0.0;
  bool uniform_mesh = false;
  std::vector<TemporalRecord> records;
};

/// Runs the manufactured problem on a fixed mesh for each M. Uses the layer
/// mesh when it exists and the piecewise uniform mesh when layers would
/// overlap. A pair counts as above the floor when the finer error exceeds
/// twice the spatial floor. Throws ManufacturedMismatch when the spec does
/// not reproduce `exact`.
TemporalReport temporal_order_study(const ProblemSpec& spec, const ManufacturedSolution& exact,
                                    std::size_t n_fixed, const std::vector<std::size_t>& m_list,
                                    const CheckPolicy& checks = {}, std::size_t threads = 1);

/// Runs fn(k) for k in [0, count) on up to `threads` workers; rethrows the
/// first exception after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace layersolve
