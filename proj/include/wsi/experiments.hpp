#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wsi/functionals.hpp"

namespace wsi {

/// One scenario check: two-sided (|value - reference| <= tol) or one-sided.
struct CheckEntry {
  enum class Mode { TwoSided, AtLeast, AtMost };
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tol = 0.0;
  Mode mode = Mode::TwoSided;
  bool pass = false;
  std::string note;
};

struct ScenarioReport {
  std::string scenario;
  std::vector<std::pair<std::string, double>> params;
  std::vector<CheckEntry> checks;
  std::vector<std::string> warnings;
  double runtime_ms = 0.0;

  bool all_pass() const;
  CheckEntry& add(CheckEntry entry);
};

/// Weighted volume of intrinsic balls around a center vertex, with the
/// least-squares slope of vol^{1/m} over the upper half of the r grid.
struct GrowthCurve {
  int center = 0;
  std::vector<double> r;
  std::vector<double> vol;
  double slope = 0.0;
  double fit_residual = 0.0;
};

/// S^2(2) with the Gaussian density |x|^2/4: the self-shrinker ball bound
/// e^{R^2/4} R >= 2/S0, its volume form, and the H_f -> 0 refinement trend.
ScenarioReport scenario_self_shrinker(int subdiv);

/// Plane through the origin with density |x|^2/2: finite weighted volume
/// (-> 2pi), H_f = 0 pointwise, |H_f - grad f| = |x|, and the unbounded f*
/// that breaks the finiteness theorem's hypothesis.
ScenarioReport scenario_gaussian_plane(double L, int n);

/// Equatorial S^2(1/b) inside the round S^3(1/b): J_bar > s0 for every
/// kappa, so the closed minimal surface fails admissibility (as it must).
ScenarioReport scenario_sphere_ambient_negative(double b);

enum class GrowthShape { Plane, Cylinder };

struct EndGrowthResult {
  std::vector<GrowthCurve> curves;
  ScenarioReport report;
};

/// Volume-growth engine of the infinite-end theorem on finite patches:
/// slope of vol_f^{1/m} against C/m with 2C = (S e^{f*/m})^{-1}, plus
/// disjointness of well-separated intrinsic balls.  resolution <= 0 picks a
/// default.
EndGrowthResult scenario_end_growth(GrowthShape shape, double extent, int centers,
                                    int resolution = 0);

struct SuiteReport {
  std::vector<ScenarioReport> reports;
  bool ok = true;
};

/// Config text: one scenario per line ("name key=value ..."), '#' comments.
/// Unknown scenario names or keys are config errors.
SuiteReport run_all(const std::string& config_text);
std::string default_config();

std::string scenario_report_to_json(const ScenarioReport& report);
std::string suite_report_to_json(const SuiteReport& suite);
std::string growth_curves_to_csv(const std::vector<GrowthCurve>& curves);

}  // namespace wsi
