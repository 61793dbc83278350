#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "layersolve/mesh.hpp"
#include "layersolve/problem.hpp"

namespace layersolve {

/// Row i reads sub[i] U_{i-1} + diag[i] U_i + sup[i] U_{i+1} = rhs[i].
/// sub[0] and sup[N] are unused and kept at zero.
///
/// Rows are stored with a positive diagonal: the Crank-Nicolson row for the
/// operator eps D2 + mu a D* - c_half I is multiplied by -1, so an M-matrix
/// shows up as non-positive off-diagonals directly in the stored entries.
struct TridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> sup;
  std::vector<double> rhs;

  TridiagonalSystem() = default;
  explicit TridiagonalSystem(std::size_t rows)
      : sub(rows, 0.0), diag(rows, 0.0), sup(rows, 0.0), rhs(rows, 0.0) {}

  std::size_t size() const noexcept { return diag.size(); }
  /// (A x)_i
  double apply_row(std::size_t i, std::span<const double> x) const;
};

/// Coefficients on U_{i-1}, U_i, U_{i+1} at the new level, and the row's
/// right-hand side.
struct StencilWeights {
  double w_minus = 0.0;
  double w_center = 0.0;
  double w_plus = 0.0;
  double forcing = 0.0;
};

/// Crank-Nicolson row at interior node i != N/2:
///
///   eps D2 U^{j+1} + mu a D* U^{j+1} - c_half U^{j+1} = g~,
///   g~ = 2 f - eps D2 U^j - mu a D* U^j + d_half U^j,
///
/// with c_half = b + 2c/dt, d_half = b - 2c/dt, D* = D- left of d and D+
/// right of d, D2 U_i = 2 (D+ U_i - D- U_i) / (x_{i+1} - x_{i-1}). All
/// coefficients are taken at (x_i, t_mid) from the branch on i's side.
/// Returned in the stored (negated) convention.
StencilWeights interior_row(const ProblemSpec& spec, const SpatialMesh& mesh, std::size_t i,
                            double t_mid, double dt, std::span<const double> u_prev);

/// Transmission row D+ U_{N/2} = D- U_{N/2}:
/// (-1/h_{N/2}, 1/h_{N/2} + 1/h_{N/2+1}, -1/h_{N/2+1}), zero forcing.
StencilWeights discontinuity_row(const SpatialMesh& mesh);

/// Full system for the step t_next - dt -> t_next. Rows 0 and N pin the
/// Dirichlet data p(t_next), r(t_next).
TridiagonalSystem assemble(const ProblemSpec& spec, const SpatialMesh& mesh, double t_next,
                           double dt, std::span<const double> u_prev);

struct MMatrixViolation {
  enum class Kind { NonPositiveDiagonal, PositiveOffDiagonal, NotDiagonallyDominant };
  std::size_t row = 0;
  Kind kind = Kind::PositiveOffDiagonal;
  double value = 0.0;
};

std::string to_string(MMatrixViolation::Kind kind);

struct MMatrixReport {
  std::vector<MMatrixViolation> violations;
  std::size_t strictly_dominant_rows = 0;

  bool passed() const { return violations.empty() && strictly_dominant_rows > 0; }
};

/// Sign-normalizes each row to a positive diagonal, then checks
/// non-positive off-diagonals (boundary identity rows excepted) and
/// diag >= |sub| + |sup| with strict inequality in at least one row.
MMatrixReport m_matrix_check(const TridiagonalSystem& sys);

}  // namespace layersolve
