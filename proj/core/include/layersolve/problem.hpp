#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace layersolve {

using Field = std::function<double(double x, double t)>;
using BoundaryData = std::function<double(double t)>;
using InitialData = std::function<double(double x)>;

enum class Side { Left, Right };

/// Scalar field on [0,1]x[0,T] with a single jump at x = d. The left branch
/// is used for x < d, the right branch for x > d; at x = d itself callers
/// must say which one-sided value they want.
class PiecewiseField {
 public:
  PiecewiseField() = default;
  PiecewiseField(Field left, Field right, double d);

  double evaluate(Side side, double x, double t) const;

  /// Branch chosen by position; x == d resolves to the left branch.
  double operator()(double x, double t) const;

  double left_limit(double t) const { return left_(d_, t); }
  double right_limit(double t) const { return right_(d_, t); }
  /// [w](d,t) = w(d+,t) - w(d-,t)
  double jump(double t) const { return right_limit(t) - left_limit(t); }

  double discontinuity() const noexcept { return d_; }

 private:
  Field left_;
  Field right_;
  double d_ = 0.5;
};

struct PerturbationParams {
  double epsilon = 1.0;  // diffusion
  double mu = 1.0;       // convection
};

/// Throws InvalidArgument unless 0 < epsilon <= 1 and 0 < mu <= 1.
void check_params(const PerturbationParams& params);

/// eps u_xx + mu a u_x - b u - c u_t = f on (0,d) u (d,1), with Dirichlet
/// data p (x = 0), r (x = 1) and initial data q. The floors alpha1, alpha2,
/// beta, eta are supplied by the caller and cross-checked by validate().
struct ProblemSpec {
  std::string name;
  PiecewiseField a;
  PiecewiseField f;
  Field b;
  Field c;
  BoundaryData p;
  BoundaryData r;
  InitialData q;
  double d = 0.5;
  double final_time = 1.0;
  PerturbationParams params;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double beta = 1.0;
  double eta = 1.0;

  /// Same problem with different perturbation parameters.
  ProblemSpec with_params(PerturbationParams next) const;
};

enum class Hypothesis {
  Parameters,
  LeftConvectionSign,
  RightConvectionSign,
  ReactionFloor,
  TimeCoefficientFloor,
  LeftCornerCompatibility,
  RightCornerCompatibility,
  FiniteData,
};

std::string to_string(Hypothesis h);

struct HypothesisCheck {
  Hypothesis hypothesis;
  bool passed = true;
  /// Worst sample: largest violation, or smallest margin when passing.
  double worst_x = 0.0;
  double worst_t = 0.0;
  double worst_value = 0.0;
  double bound = 0.0;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  bool accepted() const;
  const HypothesisCheck& find(Hypothesis h) const;
  /// Throws the error matching the first failed hypothesis; no-op if accepted.
  void throw_if_rejected() const;
};

inline constexpr double kCompatibilityTolerance = 1e-12;

/// Checks the problem hypotheses on a tensor grid with `sample_density`
/// points per axis (x spans both branches, t spans [0,T]).
ValidationReport validate(const ProblemSpec& spec, std::size_t sample_density = 101);

enum class RegimeCase { CaseI, CaseII };

std::string to_string(RegimeCase c);

struct RegimeConstants {
  double rho = 0.0;    // min |b|/|a| over the sample grid
  double alpha = 0.0;  // min(alpha1, alpha2)
  RegimeCase regime = RegimeCase::CaseI;
};

/// Case I iff sqrt(alpha) mu <= sqrt(rho eps), evaluated as alpha mu^2 <= rho eps.
bool is_case_one(double alpha, double rho, const PerturbationParams& params);

RegimeConstants derive_regime(const ProblemSpec& spec, std::size_t sample_density = 101);

/// Sample abscissae used by validate/derive_regime: i/(n-1), i = 0..n-1,
/// with d inserted if it is not already a grid point.
std::vector<double> sample_abscissae(double d, std::size_t density);

}  // namespace layersolve
