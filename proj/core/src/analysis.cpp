#include "layersolve/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "layersolve/error.hpp"

namespace layersolve {

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) {
          try {
            fn(k);
          } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

DoubleMeshError double_mesh_error(const DiscreteSolution& coarse, const DiscreteSolution& fine) {
  const auto& cm = coarse.mesh();
  const auto& fm = fine.mesh();
  const ErrorContext where{.n = cm.n(), .m = coarse.grid().m()};
  if (fm.n() != 2 * cm.n() || fine.grid().m() != 2 * coarse.grid().m()) {
    throw Error(ErrorCode::MeshMismatch, "fine run is not a twofold refinement", where);
  }
  if (fine.grid().final_time() != coarse.grid().final_time()) {
    throw Error(ErrorCode::MeshMismatch, "final times differ", where);
  }
  for (std::size_t i = 0; i <= cm.n(); ++i) {
    if (fm.x(2 * i) != cm.x(i)) {
      throw Error(ErrorCode::MeshMismatch, "fine mesh does not contain the coarse points",
                  ErrorContext{.n = cm.n(), .m = coarse.grid().m(), .row = i});
    }
  }

  DoubleMeshError out;
  for (std::size_t j = 0; j <= coarse.grid().m(); ++j) {
    for (std::size_t i = 0; i <= cm.n(); ++i) {
      const double diff = std::abs(fine.at(2 * j, 2 * i) - coarse.at(j, i));
      if (diff > out.error) {
        out.error = diff;
        out.i = i;
        out.j = j;
      }
    }
  }
  out.x = cm.x(out.i);
  out.t = coarse.grid().time(out.j);
  return out;
}

std::optional<double> convergence_order(double coarse_error, double fine_error) {
  if (!(coarse_error > 0.0) || !(fine_error > 0.0) || !std::isfinite(coarse_error) ||
      !std::isfinite(fine_error)) {
    return std::nullopt;
  }
  return std::log2(coarse_error / fine_error);
}

SpatialMesh layer_mesh_for(const ProblemSpec& spec, std::size_t n, ThetaVariant variant) {
  const RegimeConstants regime = derive_regime(spec);
  return build_layer_mesh(regime, spec.params, n, spec.d, variant);
}

StudyResult run_convergence_study(const ProblemSpec& spec, const StudyOptions& options) {
  if (options.levels < 1) {
    throw Error(ErrorCode::InvalidArgument, "a study needs at least one level");
  }
  if (options.base_m < 1) {
    throw Error(ErrorCode::InvalidArgument, "base M must be positive");
  }
  const ErrorContext base{.n = options.base_n, .m = options.base_m};

  StudyResult result;
  result.report.params = spec.params;
  std::vector<SpatialMesh> meshes;
  try {
    validate(spec).throw_if_rejected();
    result.report.regime = derive_regime(spec);
    meshes.push_back(
        build_layer_mesh(result.report.regime, spec.params, options.base_n, spec.d, options.variant));
  } catch (const Error& e) {
    throw e.with_context(base);
  }
  result.layer = meshes.front().layer();
  result.tau = meshes.front().tau();
  for (std::size_t l = 0; l < options.levels; ++l) meshes.push_back(bisect(meshes.back()));

  const std::size_t runs = meshes.size();
  std::vector<std::optional<DiscreteSolution>> solutions(runs);
  result.runs.resize(runs);
  // Largest runs first.
  parallel_for(runs, options.threads, [&](std::size_t k) {
    const std::size_t l = runs - 1 - k;
    const std::size_t m = options.base_m << l;
    const TimeGrid grid(m, spec.final_time);
    try {
      solutions[l].emplace(march(spec, meshes[l], grid, options.checks));
    } catch (const Error& e) {
      throw e.with_context(ErrorContext{.n = meshes[l].n(), .m = m});
    }
    result.runs[l] = RunDiagnostics{meshes[l].n(), m, solutions[l]->diagnostics(),
                                    stability_audit(*solutions[l], spec)};
  });

  for (std::size_t l = 0; l < options.levels; ++l) {
    const DoubleMeshError diff = double_mesh_error(*solutions[l], *solutions[l + 1]);
    result.differences.push_back(diff);
    result.report.levels.push_back(
        LevelRecord{meshes[l].n(), options.base_m << l, diff.error, std::nullopt});
  }
  for (std::size_t l = 0; l + 1 < options.levels; ++l) {
    result.report.levels[l].order =
        convergence_order(result.report.levels[l].error, result.report.levels[l + 1].error);
  }
  return result;
}

ConvergenceReport convergence_study(const ProblemSpec& spec, const StudyOptions& options) {
  return run_convergence_study(spec, options).report;
}

ProblemSpec manufactured_problem(const ManufacturedSolution& exact, PiecewiseField a, Field b,
                                 Field c, PerturbationParams params, double d,
                                 double final_time) {
  const auto forcing = [exact, a, b, c, params](Side side) {
    return [exact, a, b, c, params, side](double x, double t) {
      return params.epsilon * exact.u_xx(x, t) + params.mu * a.evaluate(side, x, t) * exact.u_x(x, t) -
             b(x, t) * exact.u(x, t) - c(x, t) * exact.u_t(x, t);
    };
  };
  ProblemSpec spec;
  spec.name = "manufactured";
  spec.f = PiecewiseField(forcing(Side::Left), forcing(Side::Right), d);
  spec.a = std::move(a);
  spec.b = std::move(b);
  spec.c = std::move(c);
  spec.p = [exact](double t) { return exact.u(0.0, t); };
  spec.r = [exact](double t) { return exact.u(1.0, t); };
  spec.q = [exact](double x) { return exact.u(x, 0.0); };
  spec.d = d;
  spec.final_time = final_time;
  spec.params = params;
  return spec;
}

ManufacturedSolution sine_decay_solution() {
  using std::numbers::pi;
  return ManufacturedSolution{
      [](double x, double t) { return std::exp(-t) * std::sin(pi * x); },
      [](double x, double t) { return pi * std::exp(-t) * std::cos(pi * x); },
      [](double x, double t) { return -pi * pi * std::exp(-t) * std::sin(pi * x); },
      [](double x, double t) { return -std::exp(-t) * std::sin(pi * x); },
  };
}

ProblemSpec sine_decay_problem() {
  constexpr double d = 0.5;
  ProblemSpec spec = manufactured_problem(
      sine_decay_solution(),
      PiecewiseField([](double, double) { return -1.0; }, [](double, double) { return 1.0; }, d),
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; },
      PerturbationParams{1.0, 1.0}, d, 1.0);
  spec.name = "sine-decay";
  spec.alpha1 = 1.0;
  spec.alpha2 = 1.0;
  spec.beta = 1.0;
  spec.eta = 1.0;
  return spec;
}

double manufactured_residual(const ProblemSpec& spec, const ManufacturedSolution& exact,
                             std::size_t sample_density) {
  const auto xs = sample_abscissae(spec.d, sample_density);
  const double eps = spec.params.epsilon;
  const double mu = spec.params.mu;
  double worst = 0.0;
  for (std::size_t k = 0; k < sample_density; ++k) {
    const double t =
        spec.final_time * static_cast<double>(k) / static_cast<double>(sample_density - 1);
    for (double x : xs) {
      for (Side side : {Side::Left, Side::Right}) {
        if ((side == Side::Left && x > spec.d) || (side == Side::Right && x < spec.d)) continue;
        const double lhs = eps * exact.u_xx(x, t) + mu * spec.a.evaluate(side, x, t) * exact.u_x(x, t) -
                           spec.b(x, t) * exact.u(x, t) - spec.c(x, t) * exact.u_t(x, t);
        const double res = std::abs(lhs - spec.f.evaluate(side, x, t));
        worst = std::isfinite(res) ? std::max(worst, res) : INFINITY;
      }
    }
  }
  return worst;
}

TemporalReport temporal_order_study(const ProblemSpec& spec, const ManufacturedSolution& exact,
                                    std::size_t n_fixed, const std::vector<std::size_t>& m_list,
                                    const CheckPolicy& checks, std::size_t threads) {
  if (m_list.empty() || std::ranges::find(m_list, std::size_t{0}) != m_list.end()) {
    throw Error(ErrorCode::InvalidArgument, "time step counts must be positive");
  }
  const double residual = manufactured_residual(spec, exact);
  if (!(residual <= kManufacturedTolerance)) {
    throw Error(ErrorCode::ManufacturedMismatch,
                "exact solution leaves residual " + std::to_string(residual));
  }

  TemporalReport report;
  report.n = n_fixed;
  SpatialMesh mesh;
  try {
    mesh = layer_mesh_for(spec, n_fixed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::LayersOverlap && e.code() != ErrorCode::UnsupportedRegime) throw;
    mesh = build_piecewise_uniform_mesh(n_fixed, spec.d);
    report.uniform_mesh = true;
  }

  std::size_t common = 1;
  for (std::size_t m : m_list) common = std::lcm(common, m);
  const std::size_t target = 16 * std::ranges::max(m_list);
  report.reference_m = common * ((target + common - 1) / common);

  const auto exact_error = [&](const DiscreteSolution& sol) {
    double worst = 0.0;
    for (std::size_t j = 0; j <= sol.grid().m(); ++j) {
      const double t = sol.grid().time(j);
      for (std::size_t i = 0; i <= mesh.n(); ++i) {
        worst = std::max(worst, std::abs(sol.at(j, i) - exact.u(mesh.x(i), t)));
      }
    }
    return worst;
  };

  const DiscreteSolution reference =
      march(spec, mesh, TimeGrid(report.reference_m, spec.final_time), checks);
  report.spatial_floor = exact_error(reference);

  report.records.resize(m_list.size());
  parallel_for(m_list.size(), threads, [&](std::size_t k) {
    const std::size_t m = m_list[k];
    const DiscreteSolution sol = march(spec, mesh, TimeGrid(m, spec.final_time), checks);
    const std::size_t stride = report.reference_m / m;
    double temporal = 0.0;
    for (std::size_t j = 0; j <= m; ++j) {
      for (std::size_t i = 0; i <= mesh.n(); ++i) {
        temporal = std::max(temporal, std::abs(sol.at(j, i) - reference.at(j * stride, i)));
      }
    }
    report.records[k] = TemporalRecord{.m = m, .error = exact_error(sol), .temporal_error = temporal};
  });

  for (std::size_t k = 0; k + 1 < report.records.size(); ++k) {
    auto& rec = report.records[k];
    const auto& next = report.records[k + 1];
    if (next.error > 0.0) {
      rec.ratio = rec.error / next.error;
      rec.order = std::log2(*rec.ratio);
    }
    if (next.temporal_error > 0.0) rec.temporal_ratio = rec.temporal_error / next.temporal_error;
    rec.above_floor = next.error > 2.0 * report.spatial_floor;
  }
  return report;
}

}  // namespace layersolve
