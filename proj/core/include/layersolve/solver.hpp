#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "layersolve/discretization.hpp"
#include "layersolve/mesh.hpp"
#include "layersolve/problem.hpp"

namespace layersolve {

inline constexpr double kMinPivot = 1e-300;

/// Thomas elimination without pivoting. Throws ZeroPivot (with the row in
/// the error context) when a pivot falls below kMinPivot in magnitude.
std::vector<double> thomas_solve(const TridiagonalSystem& sys);

/// max_i |(A x)_i - rhs_i|
double residual_max_norm(const TridiagonalSystem& sys, std::span<const double> x);

enum class CheckMode { Strict, Warn, Off };

std::string to_string(CheckMode mode);

struct CheckPolicy {
  CheckMode mode = CheckMode::Warn;
  /// Accepted residual relative to 1 + max|rhs|.
  double residual_tolerance = 1e-10;
};

struct MarchDiagnostics {
  std::size_t systems_checked = 0;
  std::size_t m_matrix_violations = 0;
  std::size_t residual_failures = 0;
  /// max over steps of residual / (1 + max|rhs|)
  double max_relative_residual = 0.0;
  /// First few anomalies in Warn mode; counts above are complete.
  std::vector<std::string> warnings;
};

/// U^j(x_i) for j = 0..M, i = 0..N, stored row-major by time level.
class DiscreteSolution {
 public:
  DiscreteSolution(SpatialMesh mesh, TimeGrid grid, std::vector<double> values,
                   MarchDiagnostics diagnostics = {});

  const SpatialMesh& mesh() const noexcept { return mesh_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const MarchDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  double at(std::size_t j, std::size_t i) const { return values_[j * stride() + i]; }
  std::span<const double> level(std::size_t j) const {
    return std::span<const double>(values_).subspan(j * stride(), stride());
  }
  std::span<const double> values() const noexcept { return values_; }
  double max_abs() const;

 private:
  std::size_t stride() const noexcept { return mesh_.n() + 1; }

  SpatialMesh mesh_;
  TimeGrid grid_;
  std::vector<double> values_;
  MarchDiagnostics diagnostics_;
};

/// Marches the fully discrete scheme from U^0 = q on the mesh to t = T.
/// Per step (unless checks are off): M-matrix check of the assembled system
/// and a residual check of the solve. Strict mode throws MMatrixViolation or
/// ResidualTooLarge; Warn mode records them in the diagnostics.
/// Always throws ZeroPivot or NonFiniteValue. Errors carry N, M and the step.
DiscreteSolution march(const ProblemSpec& spec, const SpatialMesh& mesh, const TimeGrid& grid,
                       const CheckPolicy& checks = {});

struct AuditReport {
  double max_abs = 0.0;
  double data_sup = 0.0;    // sup of |p|, |r| on the time grid and |q| on the mesh
  double source_sup = 0.0;  // sup |f| over the sample grid, both branches
  double bound = 0.0;       // data_sup + source_sup / beta + slack
  double margin = 0.0;      // bound - max_abs
  bool passed = false;
};

inline constexpr double kAuditSlack = 1e-8;

/// Checks max |U| <= sup|data| + sup|f| / beta.
AuditReport stability_audit(const DiscreteSolution& sol, const ProblemSpec& spec,
                            std::size_t sample_density = 101);

struct EnvelopeReport {
  double max_outer_slope = 0.0;
  double slope_x = 0.0;  // left end of the steepest outer interval
  double slope_t = 0.0;
  double envelope = 0.0;
  bool passed = false;
};

/// max |D- U| over intervals inside the uniform outer segments
/// [tau1, d - tau2] and [d + tau3, 1 - tau4], all time levels; passes when it
/// stays below `envelope`. Advisory only.
EnvelopeReport layer_envelope_diagnostic(const DiscreteSolution& sol, double envelope);

}  // namespace layersolve
