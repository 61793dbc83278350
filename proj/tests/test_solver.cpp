#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "layersolve/discretization.hpp"
#include "layersolve/error.hpp"
#include "layersolve/registry.hpp"
#include "layersolve/solver.hpp"
#include "oracles/dense_solve.hpp"

namespace ls = layersolve;

namespace {

ls::ProblemSpec example1() { return ls::make_example("example1", {1e-8, 1e-6}); }

ls::SpatialMesh mesh_for(const ls::ProblemSpec& spec, std::size_t n) {
  return ls::build_layer_mesh(ls::derive_regime(spec), spec.params, n, spec.d);
}

ls::ProblemSpec zero_data(ls::ProblemSpec spec) {
  spec.f = ls::PiecewiseField([](double, double) { return 0.0; }, [](double, double) { return 0.0; }, spec.d);
  return spec;
}

ls::ProblemSpec scaled(ls::ProblemSpec spec, double s) {
  auto f = spec.f;
  auto p = spec.p;
  auto r = spec.r;
  auto q = spec.q;
  spec.f = ls::PiecewiseField([f, s](double x, double t) { return s * f.evaluate(ls::Side::Left, x, t); },
                              [f, s](double x, double t) { return s * f.evaluate(ls::Side::Right, x, t); },
                              spec.d);
  spec.p = [p, s](double t) { return s * p(t); };
  spec.r = [r, s](double t) { return s * r(t); };
  spec.q = [q, s](double x) { return s * q(x); };
  return spec;
}

oracle::DenseMatrix to_dense(const ls::TridiagonalSystem& sys) {
  oracle::DenseMatrix m(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    m(i, i) = sys.diag[i];
    if (i > 0) m(i, i - 1) = sys.sub[i];
    if (i + 1 < sys.size()) m(i, i + 1) = sys.sup[i];
  }
  return m;
}

}  // namespace

TEST(Thomas, IdentitySystem) {
  ls::TridiagonalSystem sys(4);
  sys.diag = {1, 1, 1, 1};
  sys.rhs = {3, -1, 2.5, 0};
  EXPECT_EQ(ls::thomas_solve(sys), sys.rhs);
}

TEST(Thomas, LaplacianRecoversKnownSolution) {
  const std::size_t n = 50;
  ls::TridiagonalSystem sys(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i + 1);
    sys.diag[i] = 2.0;
    if (i > 0) sys.sub[i] = -1.0;
    if (i + 1 < n) sys.sup[i] = -1.0;
  }
  for (std::size_t i = 0; i < n; ++i) sys.rhs[i] = sys.apply_row(i, x);
  const auto got = ls::thomas_solve(sys);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], x[i], 1e-10);
}

TEST(Thomas, MatchesDenseOracleOnRandomDominantSystems) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(3, 60);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(rng);
    ls::TridiagonalSystem sys(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) sys.sub[i] = unit(rng);
      if (i + 1 < n) sys.sup[i] = unit(rng);
      const double margin = 0.1 + std::abs(unit(rng));
      sys.diag[i] = (std::abs(sys.sub[i]) + std::abs(sys.sup[i]) + margin) * (unit(rng) < 0 ? -1 : 1);
      sys.rhs[i] = 10.0 * unit(rng);
    }
    const auto got = ls::thomas_solve(sys);
    const auto want = oracle::dense_solve(to_dense(sys), sys.rhs);
    double scale = 0.0;
    for (double v : want) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(got[i], want[i], 1e-12 * scale) << "trial " << trial << " i=" << i;
    }
  }
}

TEST(Thomas, ZeroPivotCarriesRow) {
  ls::TridiagonalSystem sys(3);
  sys.diag = {1.0, 1.0, 1.0};
  sys.sub = {0.0, 1.0, 0.0};
  sys.sup = {1.0, 0.0, 0.0};
  try {
    ls::thomas_solve(sys);
    FAIL();
  } catch (const ls::Error& e) {
    EXPECT_EQ(e.code(), ls::ErrorCode::ZeroPivot);
    EXPECT_EQ(e.context().row, 1u);
  }
}

TEST(Thomas, ResidualIsSmall) {
  const auto spec = example1();
  const auto mesh = mesh_for(spec, 256);
  const std::vector<double> u(257, 0.0);
  const auto sys = ls::assemble(spec, mesh, 0.5, 1.0 / 256, u);
  const auto x = ls::thomas_solve(sys);
  double rhs_max = 0.0;
  for (double v : sys.rhs) rhs_max = std::max(rhs_max, std::abs(v));
  EXPECT_LE(ls::residual_max_norm(sys, x), 1e-10 * (1.0 + rhs_max));
}

TEST(March, ZeroDataGivesZeroSolution) {
  const auto spec = zero_data(example1());
  const auto sol = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(16, 1.0));
  EXPECT_EQ(sol.max_abs(), 0.0);
  const auto audit = ls::stability_audit(sol, spec);
  EXPECT_TRUE(audit.passed);
  EXPECT_EQ(audit.data_sup, 0.0);
  EXPECT_EQ(audit.source_sup, 0.0);
}

TEST(March, SteadyDiscreteSolutionIsStationary) {
  // Steady problem: time-independent f and data. The steady discrete
  // solution solves (eps D2 + mu a D* - b) U = f with the transmission row;
  // obtain it from the dense oracle and start the march there.
  auto spec = ls::make_example("example1", {1e-3, 1e-2});
  spec.f = ls::PiecewiseField([](double x, double) { return -(1.0 + x * x); },
                              [](double x, double) { return 2.0 * (1.0 + x * x); }, spec.d);
  spec.p = [](double) { return 0.0; };
  spec.r = [](double) { return 0.0; };
  const ls::SpatialMesh mesh = ls::build_piecewise_uniform_mesh(64, 0.5);
  const std::size_t n = mesh.n();

  oracle::DenseMatrix a(n + 1);
  std::vector<double> rhs(n + 1, 0.0);
  a(0, 0) = 1.0;
  a(n, n) = 1.0;
  const double eps = spec.params.epsilon;
  const double mu = spec.params.mu;
  for (std::size_t i = 1; i < n; ++i) {
    const double hl = mesh.x(i) - mesh.x(i - 1);
    const double hr = mesh.x(i + 1) - mesh.x(i);
    if (i == n / 2) {
      a(i, i - 1) = -1.0 / hl;
      a(i, i) = 1.0 / hl + 1.0 / hr;
      a(i, i + 1) = -1.0 / hr;
      continue;
    }
    const double x = mesh.x(i);
    const double hb = 0.5 * (hl + hr);
    a(i, i - 1) += eps / (hl * hb);
    a(i, i + 1) += eps / (hr * hb);
    a(i, i) -= eps / (hl * hb) + eps / (hr * hb) + spec.b(x, 0.0);
    const auto side = i < n / 2 ? ls::Side::Left : ls::Side::Right;
    const double ma = mu * spec.a.evaluate(side, x, 0.0);
    if (i < n / 2) {
      a(i, i) += ma / hl;
      a(i, i - 1) -= ma / hl;
    } else {
      a(i, i + 1) += ma / hr;
      a(i, i) -= ma / hr;
    }
    rhs[i] = spec.f.evaluate(side, x, 0.0);
  }
  const auto steady = oracle::dense_solve(a, rhs);
  const ls::SpatialMesh mesh_copy = mesh;
  spec.q = [steady, mesh_copy](double x) {
    for (std::size_t i = 0; i <= mesh_copy.n(); ++i) {
      if (mesh_copy.x(i) == x) return steady[i];
    }
    return std::nan("");
  };
  const auto sol = ls::march(spec, mesh, ls::TimeGrid(10, 1.0));
  for (std::size_t j = 0; j <= 10; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      ASSERT_NEAR(sol.at(j, i), steady[i], 1e-11) << "j=" << j << " i=" << i;
    }
  }
}

TEST(March, InvariantsOnExampleOne) {
  const auto spec = example1();
  const auto mesh = mesh_for(spec, 64);
  const auto sol = ls::march(spec, mesh, ls::TimeGrid(64, 1.0), {ls::CheckMode::Strict});
  EXPECT_EQ(sol.values().size(), 65u * 65u);
  for (std::size_t i = 0; i <= 64; ++i) EXPECT_EQ(sol.at(0, i), spec.q(mesh.x(i)));
  for (std::size_t j = 1; j <= 64; ++j) {
    const double t = sol.grid().time(j);
    EXPECT_EQ(sol.at(j, 0), spec.p(t));
    EXPECT_EQ(sol.at(j, 64), spec.r(t));
    const double dplus = (sol.at(j, 33) - sol.at(j, 32)) / mesh.h(33);
    const double dminus = (sol.at(j, 32) - sol.at(j, 31)) / mesh.h(32);
    double level_max = 0.0;
    for (double v : sol.level(j)) level_max = std::max(level_max, std::abs(v));
    EXPECT_LE(std::abs(dplus - dminus), 1e-9 * (1.0 + level_max)) << j;
  }
  for (double v : sol.values()) EXPECT_TRUE(std::isfinite(v));
  const auto& diag = sol.diagnostics();
  EXPECT_EQ(diag.systems_checked, 64u);
  EXPECT_EQ(diag.m_matrix_violations, 0u);
  EXPECT_EQ(diag.residual_failures, 0u);
  EXPECT_LE(diag.max_relative_residual, 1e-10);
}

TEST(March, Deterministic) {
  const auto spec = example1();
  const auto mesh = mesh_for(spec, 64);
  const auto a = ls::march(spec, mesh, ls::TimeGrid(32, 1.0));
  const auto b = ls::march(spec, mesh, ls::TimeGrid(32, 1.0));
  ASSERT_EQ(a.values().size(), b.values().size());
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(March, Linear) {
  auto spec = example1();
  spec.p = [](double t) { return t; };
  const auto mesh = mesh_for(spec, 64);
  const auto base = ls::march(spec, mesh, ls::TimeGrid(32, 1.0));
  const auto tripled = ls::march(scaled(spec, 3.0), mesh, ls::TimeGrid(32, 1.0));
  const double scale = base.max_abs();
  for (std::size_t k = 0; k < base.values().size(); ++k) {
    ASSERT_NEAR(tripled.values()[k], 3.0 * base.values()[k], 1e-10 * 3.0 * scale) << k;
  }
}

TEST(March, StrictPolicyThrowsOnViolationWithStep) {
  // A negative reaction coefficient breaks diagonal dominance.
  auto spec = example1();
  spec.b = [](double, double) { return -1e6; };
  const auto mesh = mesh_for(example1(), 64);
  try {
    ls::march(spec, mesh, ls::TimeGrid(4, 1.0), {ls::CheckMode::Strict});
    FAIL();
  } catch (const ls::Error& e) {
    EXPECT_EQ(e.code(), ls::ErrorCode::MMatrixViolation);
    EXPECT_EQ(e.context().step, 1u);
    EXPECT_EQ(e.context().n, 64u);
    EXPECT_EQ(e.context().m, 4u);
  }
  const auto sol = ls::march(spec, mesh, ls::TimeGrid(4, 1.0), {ls::CheckMode::Warn});
  EXPECT_GT(sol.diagnostics().m_matrix_violations, 0u);
  EXPECT_FALSE(sol.diagnostics().warnings.empty());
  const auto off = ls::march(spec, mesh, ls::TimeGrid(4, 1.0), {ls::CheckMode::Off});
  EXPECT_EQ(off.diagnostics().systems_checked, 0u);
}

TEST(March, NonFiniteInitialDataIsReported) {
  auto spec = example1();
  spec.q = [](double x) { return x > 0.9 ? INFINITY : 0.0; };
  try {
    ls::march(spec, mesh_for(example1(), 64), ls::TimeGrid(4, 1.0));
    FAIL();
  } catch (const ls::Error& e) {
    EXPECT_EQ(e.code(), ls::ErrorCode::NonFiniteValue);
    EXPECT_EQ(e.context().step, 0u);
  }
}

TEST(StabilityAudit, ExampleOnePassesWithMargin) {
  const auto spec = example1();
  const auto sol = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(64, 1.0));
  const auto audit = ls::stability_audit(sol, spec);
  EXPECT_TRUE(audit.passed);
  EXPECT_GT(audit.margin, 0.0);
  // sup |f| = 2 (1 + 1) * 1 at x = 1, t = 1 and beta = 2.
  EXPECT_NEAR(audit.source_sup, 4.0, 1e-12);
  EXPECT_NEAR(audit.bound, 2.0 + 1e-8, 1e-12);
}

TEST(StabilityAudit, BoundScalesWithForcing) {
  const auto spec = example1();
  const auto small = scaled(spec, 1e-3);
  const auto mesh = mesh_for(spec, 64);
  const auto a = ls::stability_audit(ls::march(spec, mesh, ls::TimeGrid(8, 1.0)), spec);
  const auto b = ls::stability_audit(ls::march(small, mesh, ls::TimeGrid(8, 1.0)), small);
  EXPECT_NEAR(b.bound - ls::kAuditSlack, 1e-3 * (a.bound - ls::kAuditSlack), 1e-15);
}

TEST(Envelope, ZeroSolutionHasNoSlope) {
  const auto spec = zero_data(example1());
  const auto sol = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(8, 1.0));
  const auto env = ls::layer_envelope_diagnostic(sol, 1e-12);
  EXPECT_EQ(env.max_outer_slope, 0.0);
  EXPECT_TRUE(env.passed);
}

TEST(Envelope, LinearProfileSlope) {
  auto spec = zero_data(example1());
  spec.p = [](double) { return 0.0; };
  spec.r = [](double) { return 2.0; };
  spec.q = [](double x) { return 2.0 * x; };
  spec.b = [](double, double) { return 1.0; };
  spec.beta = 1.0;
  // f = mu a u_x - b u makes u = 2x exact for the continuous and discrete
  // problems (all differences of a linear function are exact).
  const double mu = spec.params.mu;
  spec.f = ls::PiecewiseField(
      [mu, a = spec.a](double x, double t) { return mu * a.evaluate(ls::Side::Left, x, t) * 2.0 - 2.0 * x; },
      [mu, a = spec.a](double x, double t) { return mu * a.evaluate(ls::Side::Right, x, t) * 2.0 - 2.0 * x; },
      spec.d);
  const auto sol = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(8, 1.0));
  const auto env = ls::layer_envelope_diagnostic(sol, 100.0);
  EXPECT_NEAR(env.max_outer_slope, 2.0, 1e-8);
  EXPECT_TRUE(env.passed);
  EXPECT_FALSE(ls::layer_envelope_diagnostic(sol, 1.0).passed);
}

TEST(Envelope, ExampleOneBelowRegressionThreshold) {
  const auto spec = example1();
  const auto sol = ls::march(spec, mesh_for(spec, 128), ls::TimeGrid(128, 1.0));
  EXPECT_TRUE(ls::layer_envelope_diagnostic(sol, 100.0).passed);
}
