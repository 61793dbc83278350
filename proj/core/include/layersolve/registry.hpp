#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "layersolve/problem.hpp"

namespace layersolve {

/// Keys accepted by make_example().
std::vector<std::string> example_keys();

/// Built-in test problems with discontinuous convection and source at d = 0.5:
///   a = -(1 + x(1-x)) left, +(1 + x(1-x)) right; b = 1 + e^x; c = 1;
///   f = -2(1+x^2)t left and k(1+x^2)t right, k = 2 ("example1") or 3
///   ("example2"); zero boundary and initial data; T = 1.
/// Throws UnknownExample for any other key.
ProblemSpec make_example(std::string_view key, PerturbationParams params);

}  // namespace layersolve
