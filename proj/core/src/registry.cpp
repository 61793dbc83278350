#include "layersolve/registry.hpp"

#include <cmath>

#include "layersolve/error.hpp"

namespace layersolve {

std::vector<std::string> example_keys() { return {"example1", "example2"}; }

namespace {

ProblemSpec example_with_right_source(std::string name, double right_scale,
                                      PerturbationParams params) {
  constexpr double d = 0.5;
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.d = d;
  spec.final_time = 1.0;
  spec.params = params;
  spec.a = PiecewiseField([](double x, double) { return -(1.0 + x * (1.0 - x)); },
                          [](double x, double) { return 1.0 + x * (1.0 - x); }, d);
  spec.f = PiecewiseField([](double x, double t) { return -2.0 * (1.0 + x * x) * t; },
                          [right_scale](double x, double t) {
                            return right_scale * (1.0 + x * x) * t;
                          },
                          d);
  spec.b = [](double x, double) { return 1.0 + std::exp(x); };
  spec.c = [](double, double) { return 1.0; };
  spec.p = [](double) { return 0.0; };
  spec.r = [](double) { return 0.0; };
  spec.q = [](double) { return 0.0; };
  // |a| = 1 + x(1-x) >= 1 on [0,1]; b >= 2 at x = 0.
  spec.alpha1 = 1.0;
  spec.alpha2 = 1.0;
  spec.beta = 2.0;
  spec.eta = 1.0;
  return spec;
}

}  // namespace

ProblemSpec make_example(std::string_view key, PerturbationParams params) {
  if (key == "example1") return example_with_right_source("example1", 2.0, params);
  if (key == "example2") return example_with_right_source("example2", 3.0, params);
  throw Error(ErrorCode::UnknownExample, "unknown example '" + std::string(key) + "'");
}

}  // namespace layersolve
