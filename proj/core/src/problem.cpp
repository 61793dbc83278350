#include "layersolve/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "layersolve/error.hpp"

namespace layersolve {

PiecewiseField::PiecewiseField(Field left, Field right, double d)
    : left_(std::move(left)), right_(std::move(right)), d_(d) {
  if (!left_ || !right_) {
    throw Error(ErrorCode::InvalidArgument, "piecewise field needs both branches");
  }
}

double PiecewiseField::evaluate(Side side, double x, double t) const {
  return side == Side::Left ? left_(x, t) : right_(x, t);
}

double PiecewiseField::operator()(double x, double t) const {
  return x <= d_ ? left_(x, t) : right_(x, t);
}

void check_params(const PerturbationParams& params) {
  const auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(params.epsilon) || !in_unit(params.mu)) {
    std::ostringstream os;
    os << "perturbation parameters must lie in (0,1]: epsilon=" << params.epsilon
       << " mu=" << params.mu;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

ProblemSpec ProblemSpec::with_params(PerturbationParams next) const {
  ProblemSpec copy = *this;
  copy.params = next;
  return copy;
}

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::Parameters: return "parameters";
    case Hypothesis::LeftConvectionSign: return "a <= -alpha1 on left branch";
    case Hypothesis::RightConvectionSign: return "a >= alpha2 on right branch";
    case Hypothesis::ReactionFloor: return "b >= beta";
    case Hypothesis::TimeCoefficientFloor: return "c >= eta";
    case Hypothesis::LeftCornerCompatibility: return "q(0) = p(0)";
    case Hypothesis::RightCornerCompatibility: return "q(1) = r(0)";
    case Hypothesis::FiniteData: return "finite data";
  }
  return "unknown";
}

std::string to_string(RegimeCase c) {
  return c == RegimeCase::CaseI ? "CaseI" : "CaseII";
}

std::vector<double> sample_abscissae(double d, std::size_t density) {
  if (density < 2) {
    throw Error(ErrorCode::InvalidArgument, "sample density must be at least 2");
  }
  std::vector<double> xs(density);
  for (std::size_t i = 0; i < density; ++i) {
    xs[i] = static_cast<double>(i) / static_cast<double>(density - 1);
  }
  if (!std::binary_search(xs.begin(), xs.end(), d)) {
    xs.insert(std::upper_bound(xs.begin(), xs.end(), d), d);
  }
  return xs;
}

namespace {

std::vector<double> sample_times(double final_time, std::size_t density) {
  std::vector<double> ts(density);
  for (std::size_t j = 0; j < density; ++j) {
    ts[j] = final_time * static_cast<double>(j) / static_cast<double>(density - 1);
  }
  ts.back() = final_time;
  return ts;
}

// Tracks the worst sample of a lower-bound hypothesis value >= bound.
struct FloorTracker {
  HypothesisCheck check;
  double worst_margin = std::numeric_limits<double>::infinity();

  FloorTracker(Hypothesis h, double bound) {
    check.hypothesis = h;
    check.bound = bound;
  }

  void observe(double value, double x, double t) {
    const double margin = value - check.bound;
    if (margin < worst_margin) {
      worst_margin = margin;
      check.worst_x = x;
      check.worst_t = t;
      check.worst_value = value;
    }
    if (!(margin >= 0.0)) check.passed = false;
  }
};

}  // namespace

bool ValidationReport::accepted() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck& ValidationReport::find(Hypothesis h) const {
  for (const auto& c : checks) {
    if (c.hypothesis == h) return c;
  }
  throw Error(ErrorCode::InvalidArgument, "hypothesis not in report: " + to_string(h));
}

void ValidationReport::throw_if_rejected() const {
  for (const auto& c : checks) {
    if (c.passed) continue;
    std::ostringstream os;
    os << to_string(c.hypothesis) << " fails at x=" << c.worst_x << " t=" << c.worst_t
       << " (value " << c.worst_value << ", bound " << c.bound << ")";
    switch (c.hypothesis) {
      case Hypothesis::Parameters:
        throw Error(ErrorCode::InvalidArgument, os.str());
      case Hypothesis::LeftConvectionSign:
      case Hypothesis::RightConvectionSign:
        throw Error(ErrorCode::SignViolation, os.str());
      case Hypothesis::ReactionFloor:
      case Hypothesis::TimeCoefficientFloor:
        throw Error(ErrorCode::FloorViolation, os.str());
      case Hypothesis::LeftCornerCompatibility:
      case Hypothesis::RightCornerCompatibility:
        throw Error(ErrorCode::CompatibilityViolation, os.str());
      case Hypothesis::FiniteData:
        throw Error(ErrorCode::EvaluationFailure, os.str());
    }
  }
}

ValidationReport validate(const ProblemSpec& spec, std::size_t sample_density) {
  ValidationReport report;

  HypothesisCheck params{Hypothesis::Parameters};
  const auto& pp = spec.params;
  params.passed = pp.epsilon > 0.0 && pp.epsilon <= 1.0 && pp.mu > 0.0 && pp.mu <= 1.0 &&
                  spec.d > 0.0 && spec.d < 1.0 && spec.final_time > 0.0 &&
                  spec.alpha1 > 0.0 && spec.alpha2 > 0.0 && spec.beta > 0.0 &&
                  spec.eta > 0.0 && spec.a.discontinuity() == spec.d &&
                  spec.f.discontinuity() == spec.d;
  params.worst_value = pp.epsilon;
  params.bound = pp.mu;
  report.checks.push_back(params);
  if (!params.passed) return report;

  const auto xs = sample_abscissae(spec.d, sample_density);
  const auto ts = sample_times(spec.final_time, sample_density);

  // -a >= alpha1 on the left branch, a >= alpha2 on the right one.
  FloorTracker left_sign(Hypothesis::LeftConvectionSign, spec.alpha1);
  FloorTracker right_sign(Hypothesis::RightConvectionSign, spec.alpha2);
  FloorTracker reaction(Hypothesis::ReactionFloor, spec.beta);
  FloorTracker time_coef(Hypothesis::TimeCoefficientFloor, spec.eta);
  HypothesisCheck finite{Hypothesis::FiniteData};

  const auto note_finite = [&](double v, double x, double t) {
    if (!std::isfinite(v) && finite.passed) {
      finite.passed = false;
      finite.worst_x = x;
      finite.worst_t = t;
      finite.worst_value = v;
    }
  };

  for (double t : ts) {
    for (double x : xs) {
      if (x <= spec.d) {
        const double a = spec.a.evaluate(Side::Left, x, t);
        const double f = spec.f.evaluate(Side::Left, x, t);
        note_finite(a, x, t);
        note_finite(f, x, t);
        left_sign.observe(-a, x, t);
      }
      if (x >= spec.d) {
        const double a = spec.a.evaluate(Side::Right, x, t);
        const double f = spec.f.evaluate(Side::Right, x, t);
        note_finite(a, x, t);
        note_finite(f, x, t);
        right_sign.observe(a, x, t);
      }
      const double b = spec.b(x, t);
      const double c = spec.c(x, t);
      note_finite(b, x, t);
      note_finite(c, x, t);
      reaction.observe(b, x, t);
      time_coef.observe(c, x, t);
    }
    note_finite(spec.p(t), 0.0, t);
    note_finite(spec.r(t), 1.0, t);
  }
  for (double x : xs) note_finite(spec.q(x), x, 0.0);

  // The sign trackers store -a on the left; report the actual a value.
  left_sign.check.worst_value = -left_sign.check.worst_value;
  left_sign.check.bound = -spec.alpha1;

  const auto corner = [](Hypothesis h, double initial, double boundary, double x) {
    HypothesisCheck c{h};
    c.worst_x = x;
    c.worst_t = 0.0;
    c.worst_value = std::abs(initial - boundary);
    c.bound = kCompatibilityTolerance;
    c.passed = c.worst_value <= kCompatibilityTolerance;
    return c;
  };

  report.checks.push_back(left_sign.check);
  report.checks.push_back(right_sign.check);
  report.checks.push_back(reaction.check);
  report.checks.push_back(time_coef.check);
  report.checks.push_back(
      corner(Hypothesis::LeftCornerCompatibility, spec.q(0.0), spec.p(0.0), 0.0));
  report.checks.push_back(
      corner(Hypothesis::RightCornerCompatibility, spec.q(1.0), spec.r(0.0), 1.0));
  report.checks.push_back(finite);
  return report;
}

bool is_case_one(double alpha, double rho, const PerturbationParams& params) {
  return alpha * params.mu * params.mu <= rho * params.epsilon;
}

RegimeConstants derive_regime(const ProblemSpec& spec, std::size_t sample_density) {
  const auto xs = sample_abscissae(spec.d, sample_density);
  const auto ts = sample_times(spec.final_time, sample_density);

  double rho = std::numeric_limits<double>::infinity();
  const auto observe = [&](double a, double b) {
    const double ratio = std::abs(b) / std::abs(a);
    if (!std::isfinite(ratio)) {
      throw Error(ErrorCode::EvaluationFailure, "|b|/|a| is not finite on the sample grid");
    }
    rho = std::min(rho, ratio);
  };
  for (double t : ts) {
    for (double x : xs) {
      const double b = spec.b(x, t);
      if (x <= spec.d) observe(spec.a.evaluate(Side::Left, x, t), b);
      if (x >= spec.d) observe(spec.a.evaluate(Side::Right, x, t), b);
    }
  }

  RegimeConstants regime;
  regime.rho = rho;
  regime.alpha = std::min(spec.alpha1, spec.alpha2);
  regime.regime = is_case_one(regime.alpha, rho, spec.params) ? RegimeCase::CaseI
                                                               : RegimeCase::CaseII;
  return regime;
}

}  // namespace layersolve
