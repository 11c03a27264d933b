#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wsi {

// All positions live in R^4; coordinates beyond the ambient dimension are
// zero, so norms and dot products need no special casing.
using Vec = Eigen::Vector4d;

enum class DensityKind { Zero, Gaussian4, Gaussian2 };

/// Named density f with closed-form value and R^d gradient:
/// "zero" f = 0, "gaussian4" f = |x|^2/4, "gaussian2" f = |x|^2/2.
struct Density {
  DensityKind kind = DensityKind::Zero;

  double value(const Vec& x) const;
  Vec euclidean_gradient(const Vec& x) const;
  std::string_view name() const;
  static Density by_name(std::string_view name);
};

/// Model ambient space: Euclidean R^n or the round sphere S^n(1/b) in
/// R^{n+1}, with a density.  Densities are functions of the R^d coordinates;
/// the ambient gradient is the Euclidean one for Euclidean model and its
/// tangential projection for the sphere.
struct WeightedAmbient {
  enum class Model { Euclidean, Sphere };
  Model model = Model::Euclidean;
  int n = 3;       // manifold dimension of the ambient
  double b = 0.0;  // inverse radius (Sphere only)
  Density density;

  static WeightedAmbient euclidean(int n, Density density);
  static WeightedAmbient sphere(int n, double b, Density density);

  int coord_dim() const { return model == Model::Euclidean ? n : n + 1; }
  double injectivity_radius() const;  // +inf for Euclidean, pi/b for Sphere
  double f(const Vec& x) const { return density.value(x); }
  Vec grad_f(const Vec& x) const;
};

/// Triangulated 2-dimensional submanifold with (possibly empty) boundary.
/// Topology and metric caches are built once by finalize(); meshes are
/// immutable afterwards and safe to share across threads.
struct ImmersedMesh {
  int m = 2;
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> faces;  // consistently oriented

  // Built by finalize():
  std::vector<std::array<int, 2>> boundary_edges;  // oriented as in their face
  std::vector<uint8_t> is_boundary_vertex;
  std::vector<double> face_area;
  std::vector<double> lumped_area;  // mixed Voronoi vertex areas
  std::vector<std::vector<int>> vertex_faces;
  double total_area = 0.0;
  double mesh_size = 0.0;  // max edge length

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  /// Validates manifoldness (boundary edges in exactly one face, interior in
  /// exactly two, consistent orientation) and builds all caches.
  void finalize();
};

// Scenario geometry.  All builders return finalized meshes.
ImmersedMesh build_disc(double rho, int n_r, int n_theta);
ImmersedMesh build_sphere(double r, int subdiv);            // icosphere
ImmersedMesh build_plane_patch(double L, int n);            // [-L,L]^2 in z=0
ImmersedMesh build_cylinder(double rho, double length, int n);
ImmersedMesh build_spherical_cap(double b, double angle, int n);

/// Throws unless every vertex lies on the ambient sphere within 1e-9
/// relative (no-op for Euclidean ambients).
void validate_mesh_in_ambient(const ImmersedMesh& mesh, const WeightedAmbient& ambient);

/// Weighted area: sum over faces of the degree-2 exact three-edge-midpoint
/// quadrature of e^{-f}.
double f_volume(const ImmersedMesh& mesh, const WeightedAmbient& ambient);
double f_volume_faces(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                      std::span<const int> face_indices);

/// Weighted boundary length: edge length times e^{-f(edge midpoint)}.
double boundary_f_volume(const ImmersedMesh& mesh, const WeightedAmbient& ambient);

/// Per-vertex vector field with a validity mask (mean curvature is undefined
/// at boundary vertices).
struct VertexVectors {
  std::vector<Vec> value;
  std::vector<uint8_t> defined;
};

/// Everything the functionals need per (mesh, ambient) pair.
struct AmbientFields {
  std::vector<double> f_vertex;
  std::vector<Vec> gradf_vertex;       // ambient gradient at vertices
  std::vector<Vec> gradf_tangential;   // tangential part (averaged projector)
  VertexVectors H;                     // mean curvature of M in the ambient
  VertexVectors Hf;                    // H + (grad f)^perp
  VertexVectors Hf_minus_gradf;        // H - tangential grad f
  std::vector<double> Hf_norm;
  std::vector<double> Hf_minus_gradf_norm;
};

AmbientFields compute_ambient_fields(const ImmersedMesh& mesh,
                                     const WeightedAmbient& ambient);

/// Cotangent-Laplacian mean curvature (trace convention, |H| = m/r on a
/// round m-sphere of radius r, pointing inward).  For sphere ambients the
/// known second-fundamental-form contribution of S^n(1/b) is removed.
VertexVectors mean_curvature(const ImmersedMesh& mesh, const WeightedAmbient& ambient);

/// H_f - grad f = H - (tangential part of the ambient gradient).
VertexVectors hf_minus_gradf(const ImmersedMesh& mesh, const WeightedAmbient& ambient);

/// Exact gradient of the piecewise-linear interpolant, one vector per face.
std::vector<Vec> face_gradient(const ImmersedMesh& mesh,
                               const std::vector<double>& field);

struct RadialFrame {
  double r = 0.0;
  Vec grad = Vec::Zero();  // unit ambient gradient of the distance from xi
};

/// Distance r_xi and its ambient gradient at p.  Throws std::domain_error
/// for coincident (and, on the sphere, antipodal) points.
RadialFrame ambient_radial(const WeightedAmbient& ambient, const Vec& xi, const Vec& p);

/// Distance only; well-defined down to r = 0.
double ambient_distance(const WeightedAmbient& ambient, const Vec& xi, const Vec& p);

// ASCII OFF: header "OFF", counts line, vertex lines, face lines with a
// leading 3.  Only 3-coordinate vertices are supported.
ImmersedMesh read_off(std::istream& in);
void write_off(std::ostream& out, const ImmersedMesh& mesh);
ImmersedMesh read_off_file(const std::string& path);
void write_off_file(const std::string& path, const ImmersedMesh& mesh);

/// Intrinsic distance from a source vertex to every vertex, by a first-order
/// fast-marching sweep over the triangles (edge-relaxation fallback where a
/// face update is invalid).
std::vector<double> geodesic_distances(const ImmersedMesh& mesh, int source);

}  // namespace wsi
