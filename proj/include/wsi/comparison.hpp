#pragma once

#include <string>
#include <utility>
#include <vector>

namespace wsi {

/// Nonnegative curvature bound K(t) entering the Cauchy problem
/// h'' + K h = 0.  K is even, so it is represented on t >= 0 only.
class CurvatureBound {
 public:
  enum class Kind { Zero, Constant, Tabulated };

  static CurvatureBound zero();
  /// Constant curvature b^2, b > 0.
  static CurvatureBound constant(double b_squared);
  /// Piecewise-linear K from (t, K) samples, strictly increasing in t
  /// starting at t = 0; clamped beyond the last sample.
  static CurvatureBound tabulated(std::vector<std::pair<double, double>> samples);

  Kind kind() const { return kind_; }
  double b_squared() const { return b_squared_; }
  const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  double operator()(double t) const;

 private:
  CurvatureBound() = default;
  Kind kind_ = Kind::Zero;
  double b_squared_ = 0.0;
  std::vector<std::pair<double, double>> samples_;
};

/// Solution h of h'' + K h = 0, h(0) = 0, h'(0) = 1, on a uniform grid over
/// [0, r_max], together with the end r0 of its increasing interval and the
/// range endpoint s0 = h(r0).  If h' never vanishes on (0, r_max] the profile
/// is capped: r0 = r_max, s0 = h(r_max).
///
/// Immutable after construction; all evaluation is const and thread-safe.
struct ComparisonProfile {
  CurvatureBound curvature = CurvatureBound::zero();
  double step = 0.0;               // actual grid spacing
  std::vector<double> t, h, hp;    // uniform grid, t[0] = 0
  double r0 = 0.0;
  double s0 = 0.0;
  double r_max = 0.0;
  bool is_capped = false;

  // Set by closed_form_profile; evaluation then bypasses the grid.
  enum class Analytic { None, Linear, Sine };
  Analytic analytic = Analytic::None;
  double b = 0.0;  // Sine only

  double r0_over_s0() const { return r0 / s0; }
};

/// Integrate the Cauchy problem with classical RK4 at fixed step; r0 is the
/// first zero of h' (sign change plus bisection refinement to tolerance
/// step^2).
ComparisonProfile solve_profile(const CurvatureBound& curvature, double r_max,
                                double step);

/// Exact profile for the Zero (h = t) and Constant (h = sin(bt)/b) variants.
/// Used as the oracle for solve_profile.  step <= 0 picks a default grid.
ComparisonProfile closed_form_profile(const CurvatureBound& curvature,
                                      double r_max, double step = 0.0);

/// Piecewise cubic Hermite interpolation of h on [0, r0].
double eval_h(const ComparisonProfile& profile, double t);

/// Piecewise linear interpolation of h' on [0, r0].
double eval_h_prime(const ComparisonProfile& profile, double t);

/// Monotone bisection inverse of h on [0, s0]; invert_h(0) = 0.
/// Throws std::out_of_range for s outside [0, s0].
double invert_h(const ComparisonProfile& profile, double s);

/// JSON round-trip with doubles at 17 significant digits:
/// {curvature, step, r0, s0, is_capped, grid:[[t,h,hp],...]}.
std::string profile_to_json(const ComparisonProfile& profile);
ComparisonProfile profile_from_json(const std::string& json_text);

}  // namespace wsi
