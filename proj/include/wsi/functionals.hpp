#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsi/comparison.hpp"
#include "wsi/constants.hpp"
#include "wsi/geometry.hpp"

namespace wsi {

/// Plateau smoothing for the lambda / delta cutoffs.  Smoothstep is the C^1
/// cubic 3u^2 - 2u^3 on [0, epsilon]; IndicatorLimit is the epsilon -> 0
/// limit (sharp indicator).
struct SmoothingSpec {
  enum class Kind { Smoothstep, IndicatorLimit };
  Kind kind = Kind::Smoothstep;
  double epsilon = 0.0;

  static SmoothingSpec smoothstep(double epsilon);
  static SmoothingSpec indicator_limit();

  /// lambda(t) = 0 for t <= 0 and 1 for t >= epsilon.
  double lambda(double t) const;
  /// delta(t) = 0 for t <= -epsilon and 1 for t >= 0.
  double delta(double t) const;
};

/// The four radius curves of the lemma machinery, sampled on R_grid:
///   phi(R)     = integral of lambda(R - r_xi) phi dmu
///   psi(R)     = integral of lambda(R - r_xi) |grad phi + phi (H_f - grad f)| dmu
///   phi_bar(R) = integral of phi over M intersect B_R(xi)
///   psi_bar(R) = same ball restriction of the psi integrand
struct ProfileCurves {
  int xi = 0;
  int m = 2;
  double mesh_size = 0.0;
  SmoothingSpec smoothing;
  std::vector<double> R, phi, psi, phi_bar, psi_bar;

  /// Linear interpolation of phi_bar at radius r (clamped to the grid range).
  double phi_bar_at(double r) const;
};

struct MeshStats {
  int n_vertices = 0;
  int n_faces = 0;
  double mesh_size = 0.0;
};

/// Both sides of a Sobolev or isoperimetric inequality, the constants used,
/// and the hypothesis check.  ratio <= 1 is the verified claim whenever
/// hypotheses.admissible and the mesh resolves the geometry.
struct InequalityReport {
  enum class Kind { Sobolev, Isoperimetric };
  Kind kind = Kind::Sobolev;
  double p = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double f_star = 0.0;
  SobolevConstants constants;
  HypothesisReport hypotheses;
  MeshStats mesh;
  std::vector<std::string> warnings;
};

/// Throws unless phi is sized to the mesh, nonnegative, and zero on the
/// boundary vertices.
void validate_test_function(const ImmersedMesh& mesh, const std::vector<double>& phi);

/// Theorem-form Sobolev inequality report for exponent p in [1, m):
/// LHS = (int phi^{mp/(m-p)} dmu)^{(m-p)/m},
/// RHS = S e^{f*/m} int (|grad phi| + phi |H_f - grad f|)^p dmu.
/// kappa = NaN selects kappa_star.  Precomputed fields may be passed to
/// avoid recomputing curvature on repeated calls.
InequalityReport sobolev_sides(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                               const std::vector<double>& phi, double p,
                               const ComparisonProfile& profile, double kappa,
                               const AmbientFields* fields = nullptr);

/// LHS = vol_f(M)^{(m-1)/m}, RHS = S e^{f*/m} (vol_f(boundary) +
/// int |H_f - grad f| dmu).
InequalityReport isoperimetric_sides(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                     const ComparisonProfile& profile, double kappa,
                                     const AmbientFields* fields = nullptr);

/// Sample all four curves over R_grid by face quadrature; ball membership is
/// decided per quadrature point (r_xi < R).
ProfileCurves profile_curves(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                             const std::vector<double>& phi, int xi,
                             const SmoothingSpec& smoothing, std::vector<double> R_grid,
                             const AmbientFields* fields = nullptr);

struct Lemma41Result {
  double max_residual = 0.0;  // max over interior grid points of -d/dR(h^{-m} phi) - h^{-m} psi
  double arg_R = 0.0;
  double tol = 0.0;  // 5 (mesh size + grid spacing) * curve sup
  bool pass = false;
};

/// Central-difference check of the monotonicity lemma for h^{-m} phi.
Lemma41Result lemma41_residual(const ProfileCurves& curves, const ComparisonProfile& profile,
                               int m);

/// Inputs of the witness lemma; J uses the integral of phi (not the support
/// volume) and alpha = h^{-1}(J).
struct Lemma42Instance {
  double kappa = 0.0;
  double t = 0.0;
  double J = 0.0;
  double alpha = 0.0;
  double phi_at_xi = 0.0;
  double R0 = 0.0;  // min(Inj, r0)
};

Lemma42Instance lemma42_instance(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                 const std::vector<double>& phi, int xi, double kappa,
                                 double t, const ComparisonProfile& profile,
                                 const AmbientFields* fields = nullptr);

/// Scans the curve grid over (0, alpha) for the first R with
/// phi_bar(tR) <= (2 alpha / kappa) t^{m-1} psi_bar(R).  Returns nullopt if
/// no grid radius qualifies; throws std::invalid_argument naming any failed
/// precondition.
std::optional<double> lemma42_witness(const ProfileCurves& curves,
                                      const Lemma42Instance& instance, int m);

struct HessianaResult {
  double min_gap = 0.0;  // min over faces of LHS - RHS
  double tol = 0.0;
  int excluded_faces = 0;  // beyond min(Inj, r0) from xi
  bool pass = false;
};

/// Face-wise check of D_f X_xi >= m h'(r) + h(r) <H_f - grad f, grad r>,
/// with div X from the closed-form ambient Jacobian of X = h(r) grad r
/// restricted to the face plane.
HessianaResult hessiana_check(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                              const Vec& xi, const ComparisonProfile& profile,
                              const AmbientFields* fields = nullptr);

struct LevelsetResult {
  double lhs = 0.0;  // int_0^inf s^{1/(m-1)} vol_f({phi >= s}) ds
  double rhs = 0.0;  // (m-1)/m int phi^{m/(m-1)} dmu
  double rel_error = 0.0;
};

/// Coarea-type identity, with the s-integral evaluated on a uniform grid of
/// n_levels midpoints over [0, max phi].
LevelsetResult levelset_identity_check(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                       const std::vector<double>& phi, int n_levels = 512);

/// CSV export (header R,phi,psi,phi_bar,psi_bar; doubles at 17 digits).
std::string curves_to_csv(const ProfileCurves& curves);

}  // namespace wsi
