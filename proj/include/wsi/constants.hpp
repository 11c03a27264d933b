#pragma once

#include "wsi/comparison.hpp"

namespace wsi {

/// The constants entering the Sobolev inequality for intrinsic dimension m:
/// S(kappa) for the chosen kappa and r0/s0 ratio, the optimal constant S0
/// attained at kappa_star (for ratio 1), and omega_m.
struct SobolevConstants {
  int m = 2;
  double kappa = 0.0;
  double r0_over_s0 = 1.0;
  double omega_m = 0.0;
  double S = 0.0;
  double S0 = 0.0;
  double kappa_star = 0.0;
};

/// Admissibility conditions: J_bar <= s0 and h^{-1}(J_bar) <= 2*Inj.
/// Failures are flags, not errors.  alpha_bar is NaN unless cond_a holds.
struct HypothesisReport {
  double j_bar = 0.0;
  double alpha_bar = 0.0;
  double s0 = 0.0;
  double two_inj = 0.0;
  bool cond_a_holds = false;
  bool cond_b_holds = false;
  bool admissible = false;
};

/// Volume of the unit ball in R^m: pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);

/// S = 2^m m / (kappa (m-1)) * (r0/s0) * (omega_m^{-1} / (1-kappa))^{1/m}.
double sobolev_constant(int m, double kappa, double r0_over_s0);

struct OptimalConstant {
  double kappa_star = 0.0;
  double S0 = 0.0;
};

/// Minimizes sobolev_constant(m, ., 1) by golden-section search (to 1e-10 in
/// kappa) and checks the minimum against the closed form
/// S0 = 2^m (m+1)^{(m+1)/m} / (m-1) * omega_m^{-1/m} within 1e-9 relative.
OptimalConstant optimal_constant(int m);

/// Bundle m, kappa (NaN selects kappa_star) and the profile ratio into the
/// full constant set used by inequality reports.
SobolevConstants make_sobolev_constants(int m, double kappa, double r0_over_s0);

/// J_bar = (omega_m^{-1} e^{f*} / (1-kappa) * volume)^{1/m}.  The same
/// formula serves J (with the integral of phi in place of the support
/// volume).
double j_bar(int m, double kappa, double f_star, double weighted_support_volume);

/// Evaluate the admissibility conditions against a profile.  inj may be
/// infinite; for capped profiles with infinite inj, cond_b holds by
/// convention whenever cond_a does.
HypothesisReport check_hypotheses(const ComparisonProfile& profile, double jbar,
                                  double inj);

}  // namespace wsi
