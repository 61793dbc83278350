#include "layersolve/discretization.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "layersolve/error.hpp"

namespace layersolve {

double TridiagonalSystem::apply_row(std::size_t i, std::span<const double> x) const {
  double acc = diag[i] * x[i];
  if (i > 0) acc += sub[i] * x[i - 1];
  if (i + 1 < size()) acc += sup[i] * x[i + 1];
  return acc;
}

namespace {

double checked(double value, const char* what, std::size_t i) {
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << what << " is not finite at node " << i;
    throw Error(ErrorCode::EvaluationFailure, os.str(), ErrorContext{.row = i});
  }
  return value;
}

}  // namespace

StencilWeights interior_row(const ProblemSpec& spec, const SpatialMesh& mesh, std::size_t i,
                            double t_mid, double dt, std::span<const double> u_prev) {
  const std::size_t n = mesh.n();
  const std::size_t mid = mesh.d_index();
  if (i == 0 || i >= n || i == mid) {
    throw Error(ErrorCode::InvalidArgument,
                "interior_row needs 1 <= i <= N-1 and i != N/2, got " + std::to_string(i));
  }
  if (u_prev.size() != n + 1) {
    throw Error(ErrorCode::InvalidArgument, "previous level has the wrong length");
  }

  const Side side = i < mid ? Side::Left : Side::Right;
  const double x = mesh.x(i);
  const double a = checked(spec.a.evaluate(side, x, t_mid), "a", i);
  const double f = checked(spec.f.evaluate(side, x, t_mid), "f", i);
  const double b = checked(spec.b(x, t_mid), "b", i);
  const double c = checked(spec.c(x, t_mid), "c", i);
  const double eps = spec.params.epsilon;
  const double mu = spec.params.mu;

  const double h_left = mesh.h(i);
  const double h_right = mesh.h(i + 1);
  const double h_bar = 0.5 * (h_left + h_right);

  // eps D2 + mu a D* before negation.
  double op_minus = eps / (h_left * h_bar);
  double op_plus = eps / (h_right * h_bar);
  double op_center = -(op_minus + op_plus);
  if (side == Side::Left) {
    op_minus -= mu * a / h_left;
    op_center += mu * a / h_left;
  } else {
    op_plus += mu * a / h_right;
    op_center -= mu * a / h_right;
  }

  const double c_half = b + 2.0 * c / dt;
  const double d_half = b - 2.0 * c / dt;
  const double explicit_op =
      op_minus * u_prev[i - 1] + op_center * u_prev[i] + op_plus * u_prev[i + 1];
  const double g = 2.0 * f - explicit_op + d_half * u_prev[i];

  StencilWeights w;
  w.w_minus = -op_minus;
  w.w_center = c_half - op_center;
  w.w_plus = -op_plus;
  w.forcing = -g;
  return w;
}

StencilWeights discontinuity_row(const SpatialMesh& mesh) {
  const std::size_t mid = mesh.d_index();
  const double h_left = mesh.h(mid);
  const double h_right = mesh.h(mid + 1);
  return {-1.0 / h_left, 1.0 / h_left + 1.0 / h_right, -1.0 / h_right, 0.0};
}

TridiagonalSystem assemble(const ProblemSpec& spec, const SpatialMesh& mesh, double t_next,
                           double dt, std::span<const double> u_prev) {
  const std::size_t n = mesh.n();
  if (u_prev.size() != n + 1) {
    throw Error(ErrorCode::InvalidArgument, "previous level has the wrong length");
  }
  TridiagonalSystem sys(n + 1);
  sys.diag[0] = 1.0;
  sys.rhs[0] = checked(spec.p(t_next), "p", 0);
  sys.diag[n] = 1.0;
  sys.rhs[n] = checked(spec.r(t_next), "r", n);

  const double t_mid = t_next - 0.5 * dt;
  const std::size_t mid = mesh.d_index();
  for (std::size_t i = 1; i < n; ++i) {
    const StencilWeights w =
        i == mid ? discontinuity_row(mesh) : interior_row(spec, mesh, i, t_mid, dt, u_prev);
    sys.sub[i] = w.w_minus;
    sys.diag[i] = w.w_center;
    sys.sup[i] = w.w_plus;
    sys.rhs[i] = w.forcing;
  }
  return sys;
}

std::string to_string(MMatrixViolation::Kind kind) {
  switch (kind) {
    case MMatrixViolation::Kind::NonPositiveDiagonal: return "non-positive diagonal";
    case MMatrixViolation::Kind::PositiveOffDiagonal: return "positive off-diagonal";
    case MMatrixViolation::Kind::NotDiagonallyDominant: return "not diagonally dominant";
  }
  return "unknown";
}

MMatrixReport m_matrix_check(const TridiagonalSystem& sys) {
  using Kind = MMatrixViolation::Kind;
  MMatrixReport report;
  const std::size_t rows = sys.size();
  const double unit_roundoff = std::numeric_limits<double>::epsilon();

  for (std::size_t i = 0; i < rows; ++i) {
    double diag = sys.diag[i];
    double sub = i > 0 ? sys.sub[i] : 0.0;
    double sup = i + 1 < rows ? sys.sup[i] : 0.0;
    if (diag == 0.0 || !std::isfinite(diag)) {
      report.violations.push_back({i, Kind::NonPositiveDiagonal, diag});
      continue;
    }
    if (diag < 0.0) {
      diag = -diag;
      sub = -sub;
      sup = -sup;
    }
    const bool boundary_identity = (i == 0 || i + 1 == rows) && sub == 0.0 && sup == 0.0;
    if (!boundary_identity) {
      if (sub > 0.0) report.violations.push_back({i, Kind::PositiveOffDiagonal, sub});
      if (sup > 0.0) report.violations.push_back({i, Kind::PositiveOffDiagonal, sup});
    }
    const double off = std::abs(sub) + std::abs(sup);
    const double slack = diag - off;
    const double tol = 8.0 * unit_roundoff * diag;
    if (slack < -tol) {
      report.violations.push_back({i, Kind::NotDiagonallyDominant, slack});
    } else if (slack > tol) {
      ++report.strictly_dominant_rows;
    }
  }
  return report;
}

}  // namespace layersolve
