#include "layersolve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layersolve/error.hpp"

namespace layersolve {

std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
  const std::size_t n = sys.size();
  if (n == 0) return {};
  std::vector<double> c_prime(n, 0.0);
  std::vector<double> x(n, 0.0);

  const auto pivot_check = [](double pivot, std::size_t row) {
    if (!(std::abs(pivot) >= kMinPivot)) {
      std::ostringstream os;
      os << "pivot " << pivot << " at row " << row;
      throw Error(ErrorCode::ZeroPivot, os.str(), ErrorContext{.row = row});
    }
  };

  pivot_check(sys.diag[0], 0);
  c_prime[0] = sys.sup[0] / sys.diag[0];
  x[0] = sys.rhs[0] / sys.diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double pivot = sys.diag[i] - sys.sub[i] * c_prime[i - 1];
    pivot_check(pivot, i);
    c_prime[i] = i + 1 < n ? sys.sup[i] / pivot : 0.0;
    x[i] = (sys.rhs[i] - sys.sub[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] -= c_prime[i] * x[i + 1];
  }
  return x;
}

double residual_max_norm(const TridiagonalSystem& sys, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    worst = std::max(worst, std::abs(sys.apply_row(i, x) - sys.rhs[i]));
  }
  return worst;
}

std::string to_string(CheckMode mode) {
  switch (mode) {
    case CheckMode::Strict: return "strict";
    case CheckMode::Warn: return "warn";
    case CheckMode::Off: return "off";
  }
  return "unknown";
}

DiscreteSolution::DiscreteSolution(SpatialMesh mesh, TimeGrid grid, std::vector<double> values,
                                   MarchDiagnostics diagnostics)
    : mesh_(std::move(mesh)),
      grid_(grid),
      values_(std::move(values)),
      diagnostics_(std::move(diagnostics)) {
  if (values_.size() != (grid_.m() + 1) * (mesh_.n() + 1)) {
    throw Error(ErrorCode::InvalidArgument, "solution size does not match mesh and time grid");
  }
}

double DiscreteSolution::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

constexpr std::size_t kMaxStoredWarnings = 16;

void record(MarchDiagnostics& diag, const std::string& msg) {
  if (diag.warnings.size() < kMaxStoredWarnings) diag.warnings.push_back(msg);
}

}  // namespace

DiscreteSolution march(const ProblemSpec& spec, const SpatialMesh& mesh, const TimeGrid& grid,
                       const CheckPolicy& checks) {
  const std::size_t n = mesh.n();
  const std::size_t m = grid.m();
  const std::size_t stride = n + 1;

  std::vector<double> values((m + 1) * stride);
  MarchDiagnostics diag;

  for (std::size_t i = 0; i <= n; ++i) values[i] = spec.q(mesh.x(i));
  for (std::size_t i = 0; i <= n; ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::NonFiniteValue, "initial data is not finite",
                  ErrorContext{.n = n, .m = m, .step = 0, .row = i});
    }
  }

  const double dt = grid.dt();
  for (std::size_t j = 0; j < m; ++j) {
    const ErrorContext at_step{.n = n, .m = m, .step = j + 1};
    try {
      const std::span<const double> prev(values.data() + j * stride, stride);
      const TridiagonalSystem sys = assemble(spec, mesh, grid.time(j + 1), dt, prev);

      if (checks.mode != CheckMode::Off) {
        ++diag.systems_checked;
        const MMatrixReport mm = m_matrix_check(sys);
        if (!mm.passed()) {
          diag.m_matrix_violations += std::max<std::size_t>(mm.violations.size(), 1);
          std::ostringstream os;
          os << "system is not an M-matrix";
          if (!mm.violations.empty()) {
            const auto& v = mm.violations.front();
            os << ": " << to_string(v.kind) << " in row " << v.row << " (" << v.value << ")";
          }
          if (checks.mode == CheckMode::Strict) {
            throw Error(ErrorCode::MMatrixViolation, os.str(), at_step);
          }
          record(diag, os.str() + " at j=" + std::to_string(j + 1));
        }
      }

      std::vector<double> next = thomas_solve(sys);

      if (checks.mode != CheckMode::Off) {
        double rhs_max = 0.0;
        for (double v : sys.rhs) rhs_max = std::max(rhs_max, std::abs(v));
        const double rel = residual_max_norm(sys, next) / (1.0 + rhs_max);
        diag.max_relative_residual = std::max(diag.max_relative_residual, rel);
        if (!(rel <= checks.residual_tolerance)) {
          ++diag.residual_failures;
          std::ostringstream os;
          os << "relative residual " << rel << " exceeds " << checks.residual_tolerance;
          if (checks.mode == CheckMode::Strict) {
            throw Error(ErrorCode::ResidualTooLarge, os.str(), at_step);
          }
          record(diag, os.str() + " at j=" + std::to_string(j + 1));
        }
      }

      for (std::size_t i = 0; i <= n; ++i) {
        if (!std::isfinite(next[i])) {
          throw Error(ErrorCode::NonFiniteValue, "solution is not finite",
                      ErrorContext{.n = n, .m = m, .step = j + 1, .row = i});
        }
      }
      // Boundary values are assigned, not taken from the solve.
      next[0] = sys.rhs[0];
      next[n] = sys.rhs[n];
      std::copy(next.begin(), next.end(), values.begin() + (j + 1) * stride);
    } catch (const Error& e) {
      throw e.with_context(at_step);
    }
  }
  return DiscreteSolution(mesh, grid, std::move(values), std::move(diag));
}

AuditReport stability_audit(const DiscreteSolution& sol, const ProblemSpec& spec,
                            std::size_t sample_density) {
  const auto& mesh = sol.mesh();
  const auto& grid = sol.grid();
  AuditReport report;
  report.max_abs = sol.max_abs();

  for (std::size_t i = 0; i <= mesh.n(); ++i) {
    report.data_sup = std::max(report.data_sup, std::abs(spec.q(mesh.x(i))));
  }
  for (std::size_t j = 0; j <= grid.m(); ++j) {
    const double t = grid.time(j);
    report.data_sup = std::max({report.data_sup, std::abs(spec.p(t)), std::abs(spec.r(t))});
  }

  const auto xs = sample_abscissae(spec.d, sample_density);
  for (std::size_t k = 0; k < sample_density; ++k) {
    const double t =
        spec.final_time * static_cast<double>(k) / static_cast<double>(sample_density - 1);
    for (double x : xs) {
      if (x <= spec.d) {
        report.source_sup = std::max(report.source_sup, std::abs(spec.f.evaluate(Side::Left, x, t)));
      }
      if (x >= spec.d) {
        report.source_sup =
            std::max(report.source_sup, std::abs(spec.f.evaluate(Side::Right, x, t)));
      }
    }
  }

  report.bound = report.data_sup + report.source_sup / spec.beta + kAuditSlack;
  report.margin = report.bound - report.max_abs;
  report.passed = report.max_abs <= report.bound;
  return report;
}

EnvelopeReport layer_envelope_diagnostic(const DiscreteSolution& sol, double envelope) {
  const auto& mesh = sol.mesh();
  const auto& grid = sol.grid();
  const auto marks = mesh.landmark_indices();

  EnvelopeReport report;
  report.envelope = envelope;
  // Interval i spans [x_{i-1}, x_i]; outer intervals lie between landmarks.
  const auto scan = [&](std::size_t first, std::size_t last) {
    for (std::size_t j = 0; j <= grid.m(); ++j) {
      for (std::size_t i = first; i <= last; ++i) {
        const double slope = std::abs(sol.at(j, i) - sol.at(j, i - 1)) / mesh.h(i);
        if (slope > report.max_outer_slope) {
          report.max_outer_slope = slope;
          report.slope_x = mesh.x(i - 1);
          report.slope_t = grid.time(j);
        }
      }
    }
  };
  scan(marks[0] + 1, marks[1]);
  scan(marks[3] + 1, marks[4]);
  report.passed = report.max_outer_slope < envelope;
  return report;
}

}  // namespace layersolve
