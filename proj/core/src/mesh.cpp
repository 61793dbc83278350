#include "layersolve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "layersolve/error.hpp"

namespace layersolve {

std::string_view to_string(ThetaVariant v) {
  switch (v) {
    case ThetaVariant::Symmetric: return "symmetric";
    case ThetaVariant::Asymmetric: return "asymmetric";
    case ThetaVariant::CaseTwoExperimental: return "case2-experimental";
  }
  return "unknown";
}

std::string_view to_string(Segment s) {
  switch (s) {
    case Segment::L1: return "L1";
    case Segment::U1: return "U1";
    case Segment::L2: return "L2";
    case Segment::L3: return "L3";
    case Segment::U2: return "U2";
    case Segment::L4: return "L4";
  }
  return "??";
}

LayerParams layer_params(const RegimeConstants& regime, const PerturbationParams& params,
                         ThetaVariant variant) {
  check_params(params);
  if (!(regime.rho > 0.0) || !(regime.alpha > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "regime constants rho and alpha must be positive");
  }
  if (regime.regime == RegimeCase::CaseII && variant != ThetaVariant::CaseTwoExperimental) {
    throw Error(ErrorCode::UnsupportedRegime,
                "Case II (sqrt(alpha) mu > sqrt(rho eps)) needs the case2-experimental "
                "theta variant");
  }
  const double root = std::sqrt(regime.rho * regime.alpha);
  const double sqrt_eps = std::sqrt(params.epsilon);
  switch (variant) {
    case ThetaVariant::Symmetric:
      return {root / (2.0 * sqrt_eps), root / (2.0 * sqrt_eps)};
    case ThetaVariant::Asymmetric:
      return {root / sqrt_eps, root / (2.0 * sqrt_eps)};
    case ThetaVariant::CaseTwoExperimental:
      return {regime.alpha * params.mu / params.epsilon, regime.rho / (2.0 * params.mu)};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown theta variant");
}

namespace {

void require_mesh_size(std::size_t n) {
  if (n < 16 || n % 8 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "N must be a multiple of 8 and at least 16, got " + std::to_string(n));
  }
}

}  // namespace

TransitionPoints transition_points(const LayerParams& layer, std::size_t n, double d) {
  require_mesh_size(n);
  if (!(layer.theta1 > 0.0) || !(layer.theta2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "layer decay rates must be positive");
  }
  if (!(d > 0.0 && d < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "discontinuity must lie in (0,1)");
  }
  const double log_n = std::log(static_cast<double>(n));
  TransitionPoints tau;
  tau.tau1 = 4.0 / layer.theta1 * log_n;
  tau.tau2 = 4.0 / layer.theta2 * log_n;
  tau.tau3 = tau.tau2;
  tau.tau4 = tau.tau1;
  if (!(tau.tau1 + tau.tau2 < d) || !(tau.tau3 + tau.tau4 < 1.0 - d)) {
    std::ostringstream os;
    os << "layer regions overlap for N=" << n << ": tau1+tau2=" << tau.tau1 + tau.tau2
       << " (limit " << d << "), tau3+tau4=" << tau.tau3 + tau.tau4 << " (limit " << 1.0 - d
       << "); eps is too large for this N";
    throw Error(ErrorCode::LayersOverlap, os.str());
  }
  return tau;
}

SpatialMesh::SpatialMesh(std::vector<double> points, std::size_t d_index, LayerParams layer,
                         TransitionPoints tau)
    : points_(std::move(points)), d_index_(d_index), layer_(layer), tau_(tau) {
  if (points_.size() < 3 || d_index_ == 0 || d_index_ >= points_.size() - 1) {
    throw Error(ErrorCode::InvalidArgument, "mesh needs >= 3 points and an interior d index");
  }
  steps_.assign(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    steps_[i] = points_[i] - points_[i - 1];
    if (!(steps_[i] > 0.0)) {
      std::ostringstream os;
      os << "mesh is not strictly increasing at i=" << i << " (h=" << steps_[i] << ")";
      throw Error(ErrorCode::NonMonotone, os.str(), ErrorContext{.row = i});
    }
  }
}

Segment SpatialMesh::segment_of(std::size_t i) const {
  const std::size_t n = this->n();
  if (n % 8 != 0) {
    throw Error(ErrorCode::InvalidArgument, "segments are defined only for N divisible by 8");
  }
  if (i <= n / 8) return Segment::L1;
  if (i <= 3 * n / 8) return Segment::U1;
  if (i <= n / 2) return Segment::L2;
  if (i <= 5 * n / 8) return Segment::L3;
  if (i <= 7 * n / 8) return Segment::U2;
  return Segment::L4;
}

std::array<std::size_t, 5> SpatialMesh::landmark_indices() const {
  const std::size_t n = this->n();
  return {n / 8, 3 * n / 8, n / 2, 5 * n / 8, 7 * n / 8};
}

std::array<double, 5> SpatialMesh::landmark_values() const {
  const double dd = d();
  return {tau_.tau1, dd - tau_.tau2, dd, dd + tau_.tau3, 1.0 - tau_.tau4};
}

SpatialMesh build_mesh(const LayerParams& layer, const TransitionPoints& tau, std::size_t n,
                       double d) {
  require_mesh_size(n);
  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  const double s = 1.0 / root_n;
  const double w1 = 8.0 / layer.theta1;
  const double w2 = 8.0 / layer.theta2;
  const double left_uniform = d - tau.tau1 - tau.tau2;
  const double right_uniform = 1.0 - d - tau.tau3 - tau.tau4;

  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double xi = static_cast<double>(i) / nn;
    if (i <= n / 8) {
      x[i] = -w1 * std::log(1.0 + 8.0 * xi * (s - 1.0));
    } else if (i <= 3 * n / 8) {
      x[i] = tau.tau1 + left_uniform * (xi - 0.125) / 0.25;
    } else if (i <= n / 2) {
      x[i] = d + w2 * std::log(8.0 * xi * (1.0 - s) + 4.0 * s - 3.0);
    } else if (i <= 5 * n / 8) {
      x[i] = d - w2 * std::log(8.0 * xi * (s - 1.0) + 5.0 - 4.0 * s);
    } else if (i <= 7 * n / 8) {
      x[i] = d + tau.tau3 + right_uniform * (xi - 0.625) / 0.25;
    } else {
      x[i] = 1.0 + w1 * std::log(8.0 * xi * (1.0 - s) + 8.0 * s - 7.0);
    }
  }
  // Junctions come from their closed forms, not from either adjacent branch.
  x[0] = 0.0;
  x[n / 8] = tau.tau1;
  x[3 * n / 8] = d - tau.tau2;
  x[n / 2] = d;
  x[5 * n / 8] = d + tau.tau3;
  x[7 * n / 8] = 1.0 - tau.tau4;
  x[n] = 1.0;

  return SpatialMesh(std::move(x), n / 2, layer, tau);
}

SpatialMesh build_layer_mesh(const RegimeConstants& regime, const PerturbationParams& params,
                             std::size_t n, double d, ThetaVariant variant) {
  const LayerParams layer = layer_params(regime, params, variant);
  return build_mesh(layer, transition_points(layer, n, d), n, d);
}

SpatialMesh build_piecewise_uniform_mesh(std::size_t n, double d) {
  require_mesh_size(n);
  if (!(d > 0.0 && d < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "discontinuity must lie in (0,1)");
  }
  const std::size_t half = n / 2;
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= half; ++i) {
    x[i] = d * static_cast<double>(i) / static_cast<double>(half);
  }
  for (std::size_t i = half + 1; i <= n; ++i) {
    x[i] = d + (1.0 - d) * static_cast<double>(i - half) / static_cast<double>(half);
  }
  x[half] = d;
  x[n] = 1.0;

  TransitionPoints tau{d / 4.0, d / 4.0, (1.0 - d) / 4.0, (1.0 - d) / 4.0};
  const double log_n = std::log(static_cast<double>(n));
  LayerParams layer{4.0 * log_n / tau.tau1, 4.0 * log_n / tau.tau2};
  return SpatialMesh(std::move(x), half, layer, tau);
}

SpatialMesh bisect(const SpatialMesh& mesh) {
  const auto coarse = mesh.points();
  std::vector<double> fine(2 * coarse.size() - 1);
  for (std::size_t i = 0; i < coarse.size(); ++i) fine[2 * i] = coarse[i];
  for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
    fine[2 * i + 1] = 0.5 * (coarse[i] + coarse[i + 1]);
  }
  return SpatialMesh(std::move(fine), 2 * mesh.d_index(), mesh.layer(), mesh.tau());
}

bool PhiReport::within_bound() const {
  for (const auto& s : segments) {
    if (s.max_slope_ratio > bound || s.integral_ratio > bound) return false;
  }
  return true;
}

PhiReport phi_diagnostics(const SpatialMesh& mesh) {
  const std::size_t n = mesh.n();
  const double nn = static_cast<double>(n);
  const double d = mesh.d();
  const auto& layer = mesh.layer();

  // phi in each layer segment, measured away from the segment's layer edge.
  const auto phi = [&](Segment seg, double x) {
    switch (seg) {
      case Segment::L1: return layer.theta1 * x / 8.0;
      case Segment::L2: return layer.theta2 * (d - x) / 8.0;
      case Segment::L3: return layer.theta2 * (x - d) / 8.0;
      case Segment::L4: return layer.theta1 * (1.0 - x) / 8.0;
      default: return 0.0;
    }
  };

  struct Range {
    Segment seg;
    std::size_t first;  // first interval index (interval i spans [x_{i-1}, x_i])
    std::size_t last;
  };
  const std::array<Range, 4> ranges{{{Segment::L1, 1, n / 8},
                                     {Segment::L2, 3 * n / 8 + 1, n / 2},
                                     {Segment::L3, n / 2 + 1, 5 * n / 8},
                                     {Segment::L4, 7 * n / 8 + 1, n}}};

  PhiReport report;
  report.n = n;
  report.bound = 64.0 / std::sqrt(nn);
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    const auto& r = ranges[k];
    double max_slope = 0.0;
    double integral = 0.0;
    for (std::size_t i = r.first; i <= r.last; ++i) {
      const double slope = std::abs(phi(r.seg, mesh.x(i)) - phi(r.seg, mesh.x(i - 1))) * nn;
      max_slope = std::max(max_slope, slope);
      integral += slope * slope / nn;
    }
    report.segments[k] = {r.seg, max_slope / nn, integral / nn};
  }
  return report;
}

TimeGrid::TimeGrid(std::size_t m, double final_time)
    : m_(m), final_time_(final_time), dt_(final_time / static_cast<double>(m)) {
  if (m == 0 || !(final_time > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "time grid needs M >= 1 and T > 0");
  }
}

double TimeGrid::time(std::size_t j) const {
  return j == m_ ? final_time_ : static_cast<double>(j) * dt_;
}

}  // namespace layersolve
