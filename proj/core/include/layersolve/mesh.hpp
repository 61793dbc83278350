#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "layersolve/problem.hpp"

namespace layersolve {

/// Decay rates of the boundary layers (theta1) and the interior layer at d
/// (theta2), in 1/length.
struct LayerParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

enum class ThetaVariant {
  /// theta1 = theta2 = sqrt(rho alpha) / (2 sqrt(eps)). Default.
  Symmetric,
  /// theta1 = sqrt(rho alpha) / sqrt(eps), theta2 = theta1 / 2.
  Asymmetric,
  /// theta1 = alpha mu / eps, theta2 = rho / (2 mu). Only variant allowed
  /// when the regime is Case II; not validated by any convergence result.
  CaseTwoExperimental,
};

std::string_view to_string(ThetaVariant v);

LayerParams layer_params(const RegimeConstants& regime, const PerturbationParams& params,
                         ThetaVariant variant = ThetaVariant::Symmetric);

struct TransitionPoints {
  double tau1 = 0.0;  // width of [0, tau1]
  double tau2 = 0.0;  // width of [d - tau2, d]
  double tau3 = 0.0;  // width of [d, d + tau3]
  double tau4 = 0.0;  // width of [1 - tau4, 1]
};

/// tau1 = tau4 = 4 ln N / theta1, tau2 = tau3 = 4 ln N / theta2.
/// Throws InvalidArgument for N < 16 or N not a multiple of 8, LayersOverlap
/// when tau1 + tau2 >= d or tau3 + tau4 >= 1 - d.
TransitionPoints transition_points(const LayerParams& layer, std::size_t n, double d);

enum class Segment { L1, U1, L2, L3, U2, L4 };

std::string_view to_string(Segment s);

inline bool is_layer_segment(Segment s) { return s != Segment::U1 && s != Segment::U2; }

/// Ascending points x_0 = 0 < ... < x_N = 1 with x_{N/2} = d. Points are
/// immutable once built; steps()[i] = x_i - x_{i-1} for i >= 1 and
/// steps()[0] = 0.
class SpatialMesh {
 public:
  SpatialMesh() = default;

  /// Generic constructor used for refined and hand-made meshes. Throws
  /// NonMonotone if points are not strictly increasing and InvalidArgument
  /// for fewer than three points or an endpoint d_index.
  SpatialMesh(std::vector<double> points, std::size_t d_index, LayerParams layer,
              TransitionPoints tau);

  std::size_t n() const noexcept { return points_.empty() ? 0 : points_.size() - 1; }
  std::size_t d_index() const noexcept { return d_index_; }
  double d() const { return points_[d_index_]; }
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> steps() const noexcept { return steps_; }
  double x(std::size_t i) const { return points_[i]; }
  double h(std::size_t i) const { return steps_[i]; }
  const LayerParams& layer() const noexcept { return layer_; }
  const TransitionPoints& tau() const noexcept { return tau_; }

  /// Segment owning point i (and the interval (x_{i-1}, x_i]), by index range:
  /// [0,N/8] L1, (N/8,3N/8] U1, (3N/8,N/2] L2, (N/2,5N/8] L3, (5N/8,7N/8] U2,
  /// (7N/8,N] L4. Requires N divisible by 8.
  Segment segment_of(std::size_t i) const;

  /// Indices N/8, 3N/8, N/2, 5N/8, 7N/8.
  std::array<std::size_t, 5> landmark_indices() const;
  /// tau1, d - tau2, d, d + tau3, 1 - tau4.
  std::array<double, 5> landmark_values() const;

 private:
  std::vector<double> points_;
  std::vector<double> steps_;
  std::size_t d_index_ = 0;
  LayerParams layer_;
  TransitionPoints tau_;
};

/// Six-segment graded mesh: logarithmic grading on the four layer segments,
/// N/4 uniform intervals on [tau1, d - tau2] and [d + tau3, 1 - tau4].
SpatialMesh build_mesh(const LayerParams& layer, const TransitionPoints& tau, std::size_t n,
                       double d);

/// layer_params -> transition_points -> build_mesh.
SpatialMesh build_layer_mesh(const RegimeConstants& regime, const PerturbationParams& params,
                             std::size_t n, double d,
                             ThetaVariant variant = ThetaVariant::Symmetric);

/// N/2 equal intervals on [0,d] and on [d,1]. Transition widths are set to a
/// quarter of each half so that the landmark and segment bookkeeping still
/// applies. Used when layer widths would overlap (eps of order one).
SpatialMesh build_piecewise_uniform_mesh(std::size_t n, double d);

/// Inserts the midpoint of every interval: 2N + 1 points with
/// refined.x(2i) == mesh.x(i) bit for bit.
SpatialMesh bisect(const SpatialMesh& mesh);

struct PhiSegmentReport {
  Segment segment = Segment::L1;
  double max_slope_ratio = 0.0;     // max |dphi/dxi| / N
  double integral_ratio = 0.0;      // sum (dphi/dxi)^2 dxi / N
};

struct PhiReport {
  std::size_t n = 0;
  double bound = 0.0;  // 64 / sqrt(N)
  std::array<PhiSegmentReport, 4> segments;
  bool within_bound() const;
};

/// Discrete slopes of the mesh-generating functions on the four layer
/// segments, where x = (8/theta) phi(xi) relative to the segment's layer edge.
PhiReport phi_diagnostics(const SpatialMesh& mesh);

class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(std::size_t m, double final_time);

  std::size_t m() const noexcept { return m_; }
  double dt() const noexcept { return dt_; }
  double final_time() const noexcept { return final_time_; }
  /// t_j = j dt, with t_M = T exactly.
  double time(std::size_t j) const;

 private:
  std::size_t m_ = 0;
  double final_time_ = 0.0;
  double dt_ = 0.0;
};

}  // namespace layersolve
