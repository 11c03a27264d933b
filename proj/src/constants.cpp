#include "wsi/constants.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wsi {

double unit_ball_volume(int m) {
  if (m < 1) throw std::invalid_argument("unit_ball_volume: m must be >= 1");
  return std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double sobolev_constant(int m, double kappa, double r0_over_s0) {
  if (m < 2) throw std::invalid_argument("sobolev_constant: m must be >= 2");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("sobolev_constant: kappa must lie in (0,1)");
  if (!(r0_over_s0 >= 1.0))
    throw std::invalid_argument("sobolev_constant: r0/s0 must be >= 1");
  const double omega_m = unit_ball_volume(m);
  return std::pow(2.0, m) * m / (kappa * (m - 1)) * r0_over_s0 *
         std::pow(1.0 / (omega_m * (1.0 - kappa)), 1.0 / m);
}

OptimalConstant optimal_constant(int m) {
  if (m < 2) throw std::invalid_argument("optimal_constant: m must be >= 2");

  // Golden-section search; S(kappa) is unimodal on (0,1).
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-9, b = 1.0 - 1e-9;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = sobolev_constant(m, c, 1.0);
  double fd = sobolev_constant(m, d, 1.0);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sobolev_constant(m, c, 1.0);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sobolev_constant(m, d, 1.0);
    }
  }
  const double kappa_star = 0.5 * (a + b);
  const double searched = sobolev_constant(m, kappa_star, 1.0);

  const double omega_m = unit_ball_volume(m);
  const double S0 = std::pow(2.0, m) * std::pow(m + 1.0, (m + 1.0) / m) / (m - 1) *
                    std::pow(omega_m, -1.0 / m);
  if (std::abs(searched - S0) > 1e-9 * S0)
    throw std::logic_error("optimal_constant: searched minimum disagrees with closed form");
  return {kappa_star, S0};
}

SobolevConstants make_sobolev_constants(int m, double kappa, double r0_over_s0) {
  SobolevConstants c;
  c.m = m;
  c.r0_over_s0 = r0_over_s0;
  c.omega_m = unit_ball_volume(m);
  const OptimalConstant opt = optimal_constant(m);
  c.kappa_star = opt.kappa_star;
  c.S0 = opt.S0;
  c.kappa = std::isnan(kappa) ? opt.kappa_star : kappa;
  c.S = sobolev_constant(m, c.kappa, r0_over_s0);
  return c;
}

double j_bar(int m, double kappa, double f_star, double weighted_support_volume) {
  if (m < 1) throw std::invalid_argument("j_bar: m must be >= 1");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("j_bar: kappa must lie in (0,1)");
  if (weighted_support_volume < 0.0)
    throw std::invalid_argument("j_bar: negative volume");
  const double omega_m = unit_ball_volume(m);
  return std::pow(std::exp(f_star) / (omega_m * (1.0 - kappa)) * weighted_support_volume,
                  1.0 / m);
}

HypothesisReport check_hypotheses(const ComparisonProfile& profile, double jbar,
                                  double inj) {
  if (jbar < 0.0) throw std::invalid_argument("check_hypotheses: jbar must be >= 0");
  if (!(inj > 0.0)) throw std::invalid_argument("check_hypotheses: inj must be positive");

  HypothesisReport r;
  r.j_bar = jbar;
  r.s0 = profile.s0;
  r.two_inj = 2.0 * inj;
  r.alpha_bar = std::numeric_limits<double>::quiet_NaN();
  r.cond_a_holds = jbar <= profile.s0;
  if (r.cond_a_holds) {
    r.alpha_bar = invert_h(profile, jbar);
    if (profile.is_capped && std::isinf(inj))
      r.cond_b_holds = true;
    else
      r.cond_b_holds = r.alpha_bar <= r.two_inj;
  }
  r.admissible = r.cond_a_holds && r.cond_b_holds;
  return r;
}

}  // namespace wsi
