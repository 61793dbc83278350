#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "layersolve/analysis.hpp"
#include "layersolve/error.hpp"
#include "layersolve/registry.hpp"

namespace ls = layersolve;

namespace {

ls::ProblemSpec example1() { return ls::make_example("example1", {1e-8, 1e-6}); }

ls::SpatialMesh mesh_for(const ls::ProblemSpec& spec, std::size_t n) {
  return ls::build_layer_mesh(ls::derive_regime(spec), spec.params, n, spec.d);
}

// Copy of `coarse` on the bisected mesh: even indices copied, odd ones junk.
ls::DiscreteSolution injected(const ls::DiscreteSolution& coarse) {
  const std::size_t n = coarse.mesh().n();
  const std::size_t m = coarse.grid().m();
  std::vector<double> v((2 * m + 1) * (2 * n + 1), 12345.0);
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t i = 0; i <= n; ++i) v[(2 * j) * (2 * n + 1) + 2 * i] = coarse.at(j, i);
  }
  return ls::DiscreteSolution(ls::bisect(coarse.mesh()), ls::TimeGrid(2 * m, coarse.grid().final_time()),
                              std::move(v));
}

}  // namespace

TEST(DoubleMesh, InjectedCopyHasZeroError) {
  const auto spec = example1();
  const auto coarse = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(16, 1.0));
  const auto diff = ls::double_mesh_error(coarse, injected(coarse));
  EXPECT_EQ(diff.error, 0.0);
}

TEST(DoubleMesh, LocatesLargestDifference) {
  const auto spec = example1();
  const auto coarse = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(16, 1.0));
  auto fine = injected(coarse);
  std::vector<double> v(fine.values().begin(), fine.values().end());
  v[(2 * 5) * 129 + 2 * 40] += 0.25;
  const ls::DiscreteSolution bumped(fine.mesh(), fine.grid(), std::move(v));
  const auto diff = ls::double_mesh_error(coarse, bumped);
  EXPECT_DOUBLE_EQ(diff.error, 0.25);
  EXPECT_EQ(diff.i, 40u);
  EXPECT_EQ(diff.j, 5u);
  EXPECT_EQ(diff.x, coarse.mesh().x(40));
  EXPECT_EQ(diff.t, coarse.grid().time(5));
}

TEST(DoubleMesh, RebuiltFineMeshIsRejected) {
  const auto spec = example1();
  const auto coarse = ls::march(spec, mesh_for(spec, 64), ls::TimeGrid(8, 1.0));
  const auto rebuilt = ls::march(spec, mesh_for(spec, 128), ls::TimeGrid(16, 1.0));
  try {
    ls::double_mesh_error(coarse, rebuilt);
    FAIL();
  } catch (const ls::Error& e) {
    EXPECT_EQ(e.code(), ls::ErrorCode::MeshMismatch);
  }
  const auto wrong_steps = ls::march(spec, ls::bisect(mesh_for(spec, 64)), ls::TimeGrid(8, 1.0));
  EXPECT_THROW(ls::double_mesh_error(coarse, wrong_steps), ls::Error);
}

TEST(ConvergenceOrder, FirstOrderSequenceGivesOne) {
  for (double n : {64.0, 128.0, 256.0}) {
    EXPECT_NEAR(*ls::convergence_order(3.7 / n, 3.7 / (2 * n)), 1.0, 1e-14);
  }
  EXPECT_FALSE(ls::convergence_order(0.0, 0.0).has_value());
  EXPECT_FALSE(ls::convergence_order(1.0, 0.0).has_value());
}

TEST(ConvergenceStudy, ZeroDataGivesZeroErrorsAndNoOrders) {
  auto spec = example1();
  spec.f = ls::PiecewiseField([](double, double) { return 0.0; }, [](double, double) { return 0.0; }, 0.5);
  ls::StudyOptions opt;
  opt.base_n = 16;
  opt.base_m = 8;
  opt.levels = 3;
  const auto report = ls::convergence_study(spec, opt);
  ASSERT_EQ(report.levels.size(), 3u);
  for (const auto& rec : report.levels) {
    EXPECT_EQ(rec.error, 0.0);
    EXPECT_FALSE(rec.order.has_value());
  }
}

TEST(ConvergenceStudy, LevelsAreNestedAndOrdered) {
  ls::StudyOptions opt;
  opt.base_n = 32;
  opt.base_m = 16;
  opt.levels = 3;
  opt.threads = 2;
  const auto result = ls::run_convergence_study(example1(), opt);
  const auto& levels = result.report.levels;
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(levels[0].n, 32u);
  EXPECT_EQ(levels[0].m, 16u);
  EXPECT_EQ(levels[2].n, 128u);
  EXPECT_EQ(levels[2].m, 64u);
  ASSERT_EQ(result.runs.size(), 4u);
  EXPECT_EQ(result.runs[3].n, 256u);
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    ASSERT_TRUE(levels[l].order.has_value());
    EXPECT_NEAR(*levels[l].order, std::log2(levels[l].error / levels[l + 1].error), 1e-14);
  }
  EXPECT_FALSE(levels.back().order.has_value());
  EXPECT_EQ(result.report.params.epsilon, 1e-8);
  EXPECT_EQ(result.report.regime.regime, ls::RegimeCase::CaseI);
  for (const auto& run : result.runs) EXPECT_TRUE(run.audit.passed);
}

TEST(ConvergenceStudy, ThreadCountDoesNotChangeResults) {
  ls::StudyOptions opt;
  opt.base_n = 32;
  opt.base_m = 32;
  opt.levels = 2;
  const auto serial = ls::convergence_study(example1(), opt);
  opt.threads = 3;
  const auto parallel = ls::convergence_study(example1(), opt);
  EXPECT_EQ(serial.levels, parallel.levels);
}

TEST(ConvergenceStudy, OverlapAtBaseLevelCarriesContext) {
  const auto spec = ls::make_example("example1", {0.5, 0.5});
  ls::StudyOptions opt;
  opt.base_n = 16;
  opt.levels = 2;
  try {
    ls::convergence_study(spec, opt);
    FAIL();
  } catch (const ls::Error& e) {
    EXPECT_EQ(e.code(), ls::ErrorCode::LayersOverlap);
    EXPECT_EQ(e.context().n, 16u);
  }
}

TEST(Manufactured, SineDecayIsConsistent) {
  const auto spec = ls::sine_decay_problem();
  const auto exact = ls::sine_decay_solution();
  EXPECT_LE(ls::manufactured_residual(spec, exact), 1e-12);
  EXPECT_TRUE(ls::validate(spec).accepted());
  // Hand-derived forcing: f = e^{-t} (-pi^2 sin(pi x) + a pi cos(pi x)).
  using std::numbers::pi;
  for (double x : {0.1, 0.3, 0.7, 0.9}) {
    const double a = x < 0.5 ? -1.0 : 1.0;
    const double want = std::exp(-0.4) * (-pi * pi * std::sin(pi * x) + a * pi * std::cos(pi * x));
    EXPECT_NEAR(spec.f(x, 0.4), want, 1e-13);
  }
}

TEST(Manufactured, WrongForcingIsDetected) {
  auto spec = ls::sine_decay_problem();
  spec.f = ls::PiecewiseField([](double, double) { return 0.0; }, [](double, double) { return 0.0; }, 0.5);
  try {
    ls::temporal_order_study(spec, ls::sine_decay_solution(), 64, {4, 8});
    FAIL();
  } catch (const ls::Error& e) {
    EXPECT_EQ(e.code(), ls::ErrorCode::ManufacturedMismatch);
  }
}

TEST(Temporal, TimeIndependentSolutionPlateaus) {
  // u = sin(pi x): the time error is zero and every M sees the same
  // spatial error.
  using std::numbers::pi;
  const ls::ManufacturedSolution steady{
      [](double x, double) { return std::sin(pi * x); },
      [](double x, double) { return pi * std::cos(pi * x); },
      [](double x, double) { return -pi * pi * std::sin(pi * x); },
      [](double, double) { return 0.0; },
  };
  const auto base = ls::sine_decay_problem();
  const auto spec = ls::manufactured_problem(steady, base.a, base.b, base.c, base.params);
  const auto report = ls::temporal_order_study(spec, steady, 128, {4, 8, 16});
  EXPECT_TRUE(report.uniform_mesh);
  // Only the decay of the start-up transient from the sampled exact
  // solution to the discrete steady state depends on M.
  for (const auto& rec : report.records) {
    EXPECT_NEAR(rec.error, report.spatial_floor, 0.1 * report.spatial_floor);
    EXPECT_FALSE(rec.above_floor);
  }
  for (std::size_t k = 0; k + 1 < report.records.size(); ++k) {
    EXPECT_NEAR(*report.records[k].ratio, 1.0, 0.1);
    EXPECT_NEAR(*report.records[k].order, 0.0, 0.15);
  }
}

TEST(Temporal, SecondOrderBeforeSpatialFloor) {
  const auto report =
      ls::temporal_order_study(ls::sine_decay_problem(), ls::sine_decay_solution(), 512, {4, 8, 16});
  ASSERT_EQ(report.records.size(), 3u);
  EXPECT_EQ(report.reference_m, 256u);
  EXPECT_GT(*report.records[0].temporal_ratio, 3.4);
  EXPECT_GT(report.records[0].error, report.records[1].error);
  EXPECT_GT(report.records[1].error, report.records[2].error);
}

TEST(ParallelFor, RunsEveryIndexAndRethrows) {
  std::vector<int> hits(50, 0);
  ls::parallel_for(50, 4, [&](std::size_t k) { hits[k] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(ls::parallel_for(10, 3,
                                [](std::size_t k) {
                                  if (k == 7) throw ls::Error(ls::ErrorCode::IoError, "boom");
                                }),
               ls::Error);
}
