#include "wsi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace wsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec vec3(double x, double y, double z) { return Vec(x, y, z, 0.0); }

Vec cross3(const Vec& a, const Vec& b) {
  return Vec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
             a[0] * b[1] - a[1] * b[0], 0.0);
}

double triangle_area(const Vec& a, const Vec& b, const Vec& c) {
  const Vec u = b - a, v = c - a;
  const double g = u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2);
  return 0.5 * std::sqrt(std::max(0.0, g));
}

// Orthonormal basis of the face plane; false if degenerate.
bool face_basis(const Vec& a, const Vec& b, const Vec& c, Vec& e1, Vec& e2) {
  Vec u = b - a, v = c - a;
  const double lu = u.norm();
  if (lu < 1e-300) return false;
  e1 = u / lu;
  Vec w = v - v.dot(e1) * e1;
  const double lw = w.norm();
  if (lw < 1e-12 * std::max(1.0, v.norm())) return false;
  e2 = w / lw;
  return true;
}

double cotangent(const Vec& apex, const Vec& p, const Vec& q) {
  const Vec u = p - apex, v = q - apex;
  const double g = u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2);
  const double area2 = std::sqrt(std::max(0.0, g));
  if (area2 < 1e-300) return 0.0;
  return u.dot(v) / area2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Density and ambient
// ---------------------------------------------------------------------------

double Density::value(const Vec& x) const {
  switch (kind) {
    case DensityKind::Zero:
      return 0.0;
    case DensityKind::Gaussian4:
      return 0.25 * x.squaredNorm();
    case DensityKind::Gaussian2:
      return 0.5 * x.squaredNorm();
  }
  return 0.0;
}

Vec Density::euclidean_gradient(const Vec& x) const {
  switch (kind) {
    case DensityKind::Zero:
      return Vec::Zero();
    case DensityKind::Gaussian4:
      return 0.5 * x;
    case DensityKind::Gaussian2:
      return x;
  }
  return Vec::Zero();
}

std::string_view Density::name() const {
  switch (kind) {
    case DensityKind::Zero:
      return "zero";
    case DensityKind::Gaussian4:
      return "gaussian4";
    case DensityKind::Gaussian2:
      return "gaussian2";
  }
  return "zero";
}

Density Density::by_name(std::string_view name) {
  if (name == "zero") return {DensityKind::Zero};
  if (name == "gaussian4") return {DensityKind::Gaussian4};
  if (name == "gaussian2") return {DensityKind::Gaussian2};
  throw std::invalid_argument("Density::by_name: unknown density '" + std::string(name) + "'");
}

WeightedAmbient WeightedAmbient::euclidean(int n, Density density) {
  if (n < 2 || n > 4) throw std::invalid_argument("WeightedAmbient: Euclidean n must be 2..4");
  WeightedAmbient a;
  a.model = Model::Euclidean;
  a.n = n;
  a.density = density;
  return a;
}

WeightedAmbient WeightedAmbient::sphere(int n, double b, Density density) {
  if (n < 2 || n > 3) throw std::invalid_argument("WeightedAmbient: Sphere n must be 2..3");
  if (!(b > 0.0)) throw std::invalid_argument("WeightedAmbient: sphere needs b > 0");
  WeightedAmbient a;
  a.model = Model::Sphere;
  a.n = n;
  a.b = b;
  a.density = density;
  return a;
}

double WeightedAmbient::injectivity_radius() const {
  return model == Model::Euclidean ? kInf : M_PI / b;
}

Vec WeightedAmbient::grad_f(const Vec& x) const {
  Vec g = density.euclidean_gradient(x);
  if (model == Model::Sphere) {
    const double r2 = x.squaredNorm();
    if (r2 > 0.0) g -= (g.dot(x) / r2) * x;  // tangential to the sphere
  }
  return g;
}

// ---------------------------------------------------------------------------
// Mesh topology and metric caches
// ---------------------------------------------------------------------------

void ImmersedMesh::finalize() {
  const int nv = n_vertices();
  const int nf = n_faces();
  if (nv < 3 || nf < 1) throw std::invalid_argument("ImmersedMesh: too few vertices/faces");

  for (const auto& f : faces)
    for (int v : f)
      if (v < 0 || v >= nv) throw std::invalid_argument("ImmersedMesh: face index out of range");

  // Directed edge census: interior edges must be traversed once in each
  // direction, boundary edges exactly once in total.
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (min,max) -> (fwd,bwd)
  for (const auto& f : faces) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      if (a == b) throw std::invalid_argument("ImmersedMesh: degenerate face edge");
      auto key = std::minmax(a, b);
      auto& cnt = edges[{key.first, key.second}];
      (a < b ? cnt.first : cnt.second) += 1;
    }
  }

  boundary_edges.clear();
  is_boundary_vertex.assign(nv, 0);
  for (const auto& [key, cnt] : edges) {
    const int total = cnt.first + cnt.second;
    if (total > 2) throw std::invalid_argument("ImmersedMesh: non-manifold edge");
    if (total == 2) {
      if (cnt.first != 1 || cnt.second != 1)
        throw std::invalid_argument("ImmersedMesh: inconsistent face orientation");
    } else {
      const std::array<int, 2> e = cnt.first == 1
                                       ? std::array<int, 2>{key.first, key.second}
                                       : std::array<int, 2>{key.second, key.first};
      boundary_edges.push_back(e);
      is_boundary_vertex[key.first] = 1;
      is_boundary_vertex[key.second] = 1;
    }
  }

  face_area.resize(nf);
  vertex_faces.assign(nv, {});
  lumped_area.assign(nv, 0.0);
  total_area = 0.0;
  mesh_size = 0.0;

  for (int fi = 0; fi < nf; ++fi) {
    const auto& f = faces[fi];
    const Vec &a = vertices[f[0]], &b = vertices[f[1]], &c = vertices[f[2]];
    const double area = triangle_area(a, b, c);
    if (!(area > 0.0)) throw std::invalid_argument("ImmersedMesh: zero-area face");
    face_area[fi] = area;
    total_area += area;
    for (int v : f) vertex_faces[v].push_back(fi);
    mesh_size = std::max({mesh_size, (b - a).norm(), (c - b).norm(), (a - c).norm()});

    // Mixed Voronoi vertex areas (obtuse triangles fall back to area/2 at
    // the obtuse corner, area/4 at the others).
    const double cot0 = cotangent(a, b, c);
    const double cot1 = cotangent(b, c, a);
    const double cot2 = cotangent(c, a, b);
    if (cot0 < 0.0 || cot1 < 0.0 || cot2 < 0.0) {
      const int obtuse = cot0 < 0.0 ? 0 : (cot1 < 0.0 ? 1 : 2);
      for (int k = 0; k < 3; ++k) lumped_area[f[k]] += (k == obtuse ? 0.5 : 0.25) * area;
    } else {
      const double l01 = (b - a).squaredNorm();
      const double l12 = (c - b).squaredNorm();
      const double l20 = (a - c).squaredNorm();
      lumped_area[f[0]] += (l01 * cot2 + l20 * cot1) / 8.0;
      lumped_area[f[1]] += (l01 * cot2 + l12 * cot0) / 8.0;
      lumped_area[f[2]] += (l12 * cot0 + l20 * cot1) / 8.0;
    }
  }
}

// ---------------------------------------------------------------------------
// Primitive builders
// ---------------------------------------------------------------------------

ImmersedMesh build_disc(double rho, int n_r, int n_theta) {
  if (!(rho > 0.0) || n_r < 1 || n_theta < 3)
    throw std::invalid_argument("build_disc: need rho > 0, n_r >= 1, n_theta >= 3");

  // Ring radii carry a small correction so the outer polygon encloses the
  // exact disc area (the inscribed polygon would lose O(1/n_theta^2)).
  const double poly = 0.5 * n_theta * std::sin(2.0 * M_PI / n_theta);
  const double scale = std::sqrt(M_PI / poly);

  ImmersedMesh mesh;
  mesh.vertices.push_back(vec3(0, 0, 0));
  auto ring_vertex = [&](int i, int j) { return 1 + (i - 1) * n_theta + (j % n_theta); };
  for (int i = 1; i <= n_r; ++i) {
    const double r = scale * rho * i / n_r;
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * M_PI * j / n_theta;
      mesh.vertices.push_back(vec3(r * std::cos(th), r * std::sin(th), 0));
    }
  }
  for (int j = 0; j < n_theta; ++j)
    mesh.faces.push_back({0, ring_vertex(1, j), ring_vertex(1, j + 1)});
  for (int i = 1; i < n_r; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      const int p00 = ring_vertex(i, j), p10 = ring_vertex(i, j + 1);
      const int p01 = ring_vertex(i + 1, j), p11 = ring_vertex(i + 1, j + 1);
      mesh.faces.push_back({p00, p11, p10});
      mesh.faces.push_back({p00, p01, p11});
    }
  }
  mesh.finalize();
  return mesh;
}

ImmersedMesh build_sphere(double r, int subdiv) {
  if (!(r > 0.0) || subdiv < 0 || subdiv > 8)
    throw std::invalid_argument("build_sphere: need r > 0 and 0 <= subdiv <= 8");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> verts = {
      vec3(-1, phi, 0), vec3(1, phi, 0),  vec3(-1, -phi, 0), vec3(1, -phi, 0),
      vec3(0, -1, phi), vec3(0, 1, phi),  vec3(0, -1, -phi), vec3(0, 1, -phi),
      vec3(phi, 0, -1), vec3(phi, 0, 1),  vec3(-phi, 0, -1), vec3(-phi, 0, 1)};
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : verts) v = r * v.normalized();
  for (auto& t : tris) {
    const Vec n = cross3(verts[t[1]] - verts[t[0]], verts[t[2]] - verts[t[0]]);
    const Vec cen = (verts[t[0]] + verts[t[1]] + verts[t[2]]) / 3.0;
    if (n.dot(cen) < 0.0) std::swap(t[1], t[2]);
  }

  for (int s = 0; s < subdiv; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(verts.size());
      verts.push_back(r * (0.5 * (verts[a] + verts[b])).normalized());
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  ImmersedMesh mesh;
  mesh.vertices = std::move(verts);
  mesh.faces = std::move(tris);
  mesh.finalize();
  return mesh;
}

ImmersedMesh build_plane_patch(double L, int n) {
  if (!(L > 0.0) || n < 1) throw std::invalid_argument("build_plane_patch: need L > 0, n >= 1");
  ImmersedMesh mesh;
  const double h = 2.0 * L / n;
  auto id = [&](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      mesh.vertices.push_back(vec3(-L + h * i, -L + h * j, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  mesh.finalize();
  return mesh;
}

ImmersedMesh build_cylinder(double rho, double length, int n) {
  if (!(rho > 0.0) || !(length > 0.0) || n < 3)
    throw std::invalid_argument("build_cylinder: need rho > 0, length > 0, n >= 3");
  const int n_z = std::max(1, static_cast<int>(std::lround(length * n / (2.0 * M_PI * rho))));
  ImmersedMesh mesh;
  auto id = [&](int k, int j) { return k * n + (j % n); };
  for (int k = 0; k <= n_z; ++k) {
    const double z = -0.5 * length + length * k / n_z;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * M_PI * j / n;
      mesh.vertices.push_back(vec3(rho * std::cos(th), rho * std::sin(th), z));
    }
  }
  for (int k = 0; k < n_z; ++k) {
    for (int j = 0; j < n; ++j) {
      const int p00 = id(k, j), p10 = id(k, j + 1), p01 = id(k + 1, j), p11 = id(k + 1, j + 1);
      mesh.faces.push_back({p00, p10, p11});
      mesh.faces.push_back({p00, p11, p01});
    }
  }
  mesh.finalize();
  return mesh;
}

ImmersedMesh build_spherical_cap(double b, double angle, int n) {
  if (!(b > 0.0) || !(angle > 0.0) || angle > M_PI - 1e-9 || n < 2)
    throw std::invalid_argument("build_spherical_cap: need b > 0, 0 < angle < pi, n >= 2");
  const double rho = 1.0 / b;
  const int n_az = std::max(8, 4 * n);
  ImmersedMesh mesh;
  mesh.vertices.push_back(vec3(0, 0, rho));  // pole
  auto ring_vertex = [&](int i, int j) { return 1 + (i - 1) * n_az + (j % n_az); };
  for (int i = 1; i <= n; ++i) {
    const double th = angle * i / n;
    for (int j = 0; j < n_az; ++j) {
      const double az = 2.0 * M_PI * j / n_az;
      mesh.vertices.push_back(vec3(rho * std::sin(th) * std::cos(az),
                                   rho * std::sin(th) * std::sin(az), rho * std::cos(th)));
    }
  }
  for (int j = 0; j < n_az; ++j)
    mesh.faces.push_back({0, ring_vertex(1, j), ring_vertex(1, j + 1)});
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < n_az; ++j) {
      const int p00 = ring_vertex(i, j), p10 = ring_vertex(i, j + 1);
      const int p01 = ring_vertex(i + 1, j), p11 = ring_vertex(i + 1, j + 1);
      mesh.faces.push_back({p00, p11, p10});
      mesh.faces.push_back({p00, p01, p11});
    }
  }
  mesh.finalize();
  return mesh;
}

// ---------------------------------------------------------------------------
// Weighted volumes
// ---------------------------------------------------------------------------

void validate_mesh_in_ambient(const ImmersedMesh& mesh, const WeightedAmbient& ambient) {
  if (ambient.model != WeightedAmbient::Model::Sphere) return;
  const double rho = 1.0 / ambient.b;
  for (const Vec& v : mesh.vertices) {
    if (std::abs(v.norm() - rho) > 1e-9 * rho)
      throw std::invalid_argument("mesh vertex off the ambient sphere");
  }
}

namespace {

// Degree-2 exact rule: weight area/3 at each edge midpoint.
template <typename F>
double quadrature_sum(const ImmersedMesh& mesh, std::span<const int> face_indices, F&& fn) {
  double sum = 0.0;
  for (int fi : face_indices) {
    const auto& f = mesh.faces[fi];
    const Vec &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    const double w = mesh.face_area[fi] / 3.0;
    sum += w * (fn(0.5 * (a + b)) + fn(0.5 * (b + c)) + fn(0.5 * (c + a)));
  }
  return sum;
}

std::vector<int> all_faces(const ImmersedMesh& mesh) {
  std::vector<int> idx(mesh.n_faces());
  for (int i = 0; i < mesh.n_faces(); ++i) idx[i] = i;
  return idx;
}

}  // namespace

double f_volume_faces(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                      std::span<const int> face_indices) {
  validate_mesh_in_ambient(mesh, ambient);
  return quadrature_sum(mesh, face_indices,
                        [&](const Vec& p) { return std::exp(-ambient.f(p)); });
}

double f_volume(const ImmersedMesh& mesh, const WeightedAmbient& ambient) {
  const auto idx = all_faces(mesh);
  return f_volume_faces(mesh, ambient, idx);
}

double boundary_f_volume(const ImmersedMesh& mesh, const WeightedAmbient& ambient) {
  validate_mesh_in_ambient(mesh, ambient);
  double sum = 0.0;
  for (const auto& e : mesh.boundary_edges) {
    const Vec &a = mesh.vertices[e[0]], &b = mesh.vertices[e[1]];
    sum += (b - a).norm() * std::exp(-ambient.f(0.5 * (a + b)));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Curvature fields
// ---------------------------------------------------------------------------

namespace {

// Tangential projection at a vertex: area-weighted average of the incident
// face-plane projectors applied to g.
Vec project_tangential(const ImmersedMesh& mesh, int v, const Vec& g) {
  Vec acc = Vec::Zero();
  double wsum = 0.0;
  for (int fi : mesh.vertex_faces[v]) {
    const auto& f = mesh.faces[fi];
    Vec e1, e2;
    if (!face_basis(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]], e1, e2))
      continue;
    const double w = mesh.face_area[fi];
    acc += w * (g.dot(e1) * e1 + g.dot(e2) * e2);
    wsum += w;
  }
  return wsum > 0.0 ? Vec(acc / wsum) : g;
}

}  // namespace

VertexVectors mean_curvature(const ImmersedMesh& mesh, const WeightedAmbient& ambient) {
  validate_mesh_in_ambient(mesh, ambient);
  const int nv = mesh.n_vertices();
  VertexVectors H;
  H.value.assign(nv, Vec::Zero());
  H.defined.assign(nv, 1);

  // Cotangent Laplacian of the position map over lumped areas.
  std::vector<Vec> acc(nv, Vec::Zero());
  for (const auto& f : mesh.faces) {
    const Vec &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    const double cot0 = cotangent(a, b, c);   // opposite edge (b,c)
    const double cot1 = cotangent(b, c, a);   // opposite edge (c,a)
    const double cot2 = cotangent(c, a, b);   // opposite edge (a,b)
    acc[f[1]] += 0.5 * cot0 * (c - b);
    acc[f[2]] += 0.5 * cot0 * (b - c);
    acc[f[2]] += 0.5 * cot1 * (a - c);
    acc[f[0]] += 0.5 * cot1 * (c - a);
    acc[f[0]] += 0.5 * cot2 * (b - a);
    acc[f[1]] += 0.5 * cot2 * (a - b);
  }
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary_vertex[v]) {
      H.defined[v] = 0;
      continue;
    }
    Vec h = acc[v] / mesh.lumped_area[v];
    if (ambient.model == WeightedAmbient::Model::Sphere) {
      // Remove the sphere's second fundamental form trace (-m b^2 x) and any
      // residual radial component: H of M in S^n(1/b) is tangent to the sphere.
      const Vec& x = mesh.vertices[v];
      h += mesh.m * ambient.b * ambient.b * x;
      const double r2 = x.squaredNorm();
      h -= (h.dot(x) / r2) * x;
    }
    H.value[v] = h;
  }
  return H;
}

AmbientFields compute_ambient_fields(const ImmersedMesh& mesh, const WeightedAmbient& ambient) {
  const int nv = mesh.n_vertices();
  AmbientFields out;
  out.f_vertex.resize(nv);
  out.gradf_vertex.resize(nv);
  out.gradf_tangential.resize(nv);
  out.H = mean_curvature(mesh, ambient);
  out.Hf.value.assign(nv, Vec::Zero());
  out.Hf.defined = out.H.defined;
  out.Hf_minus_gradf.value.assign(nv, Vec::Zero());
  out.Hf_minus_gradf.defined = out.H.defined;
  out.Hf_norm.assign(nv, 0.0);
  out.Hf_minus_gradf_norm.assign(nv, 0.0);

  for (int v = 0; v < nv; ++v) {
    const Vec& x = mesh.vertices[v];
    out.f_vertex[v] = ambient.f(x);
    out.gradf_vertex[v] = ambient.grad_f(x);
    out.gradf_tangential[v] = project_tangential(mesh, v, out.gradf_vertex[v]);
    if (!out.H.defined[v]) continue;
    out.Hf.value[v] = out.H.value[v] + (out.gradf_vertex[v] - out.gradf_tangential[v]);
    out.Hf_minus_gradf.value[v] = out.H.value[v] - out.gradf_tangential[v];
    out.Hf_norm[v] = out.Hf.value[v].norm();
    out.Hf_minus_gradf_norm[v] = out.Hf_minus_gradf.value[v].norm();
  }
  return out;
}

VertexVectors hf_minus_gradf(const ImmersedMesh& mesh, const WeightedAmbient& ambient) {
  return compute_ambient_fields(mesh, ambient).Hf_minus_gradf;
}

// ---------------------------------------------------------------------------
// Piecewise-linear gradients
// ---------------------------------------------------------------------------

std::vector<Vec> face_gradient(const ImmersedMesh& mesh, const std::vector<double>& field) {
  if (field.size() != mesh.vertices.size())
    throw std::invalid_argument("face_gradient: field size does not match mesh");
  std::vector<Vec> grad(mesh.faces.size());
  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& f = mesh.faces[fi];
    const Vec e1 = mesh.vertices[f[1]] - mesh.vertices[f[0]];
    const Vec e2 = mesh.vertices[f[2]] - mesh.vertices[f[0]];
    const double g11 = e1.squaredNorm(), g12 = e1.dot(e2), g22 = e2.squaredNorm();
    const double det = g11 * g22 - g12 * g12;
    if (!(det > 1e-24 * std::max(1.0, g11 * g22)))
      throw std::runtime_error("face_gradient: degenerate face " + std::to_string(fi));
    const double d1 = field[f[1]] - field[f[0]];
    const double d2 = field[f[2]] - field[f[0]];
    const double c1 = (g22 * d1 - g12 * d2) / det;
    const double c2 = (g11 * d2 - g12 * d1) / det;
    grad[fi] = c1 * e1 + c2 * e2;
  }
  return grad;
}

// ---------------------------------------------------------------------------
// Ambient radial geometry
// ---------------------------------------------------------------------------

double ambient_distance(const WeightedAmbient& ambient, const Vec& xi, const Vec& p) {
  if (ambient.model == WeightedAmbient::Model::Euclidean) return (p - xi).norm();
  const double rho = 1.0 / ambient.b;
  const Vec u = xi.normalized(), v = p.normalized();
  const double c = std::clamp(u.dot(v), -1.0, 1.0);
  const double s = (v - c * u).norm();
  return rho * std::atan2(s, c);
}

RadialFrame ambient_radial(const WeightedAmbient& ambient, const Vec& xi, const Vec& p) {
  RadialFrame out;
  if (ambient.model == WeightedAmbient::Model::Euclidean) {
    const Vec d = p - xi;
    const double r = d.norm();
    if (r < 1e-12) throw std::domain_error("ambient_radial: singular point (p == xi)");
    out.r = r;
    out.grad = d / r;
    return out;
  }
  const double rho = 1.0 / ambient.b;
  const Vec u = xi.normalized(), v = p.normalized();
  const double c = std::clamp(u.dot(v), -1.0, 1.0);
  Vec w = c * v - u;  // tangential direction at p pointing away from xi
  const double s = w.norm();
  if (s < 1e-12 || c > 1.0 - 1e-12 || c < -1.0 + 1e-12)
    throw std::domain_error("ambient_radial: singular point (coincident or antipodal)");
  out.r = rho * std::atan2((v - c * u).norm(), c);
  out.grad = w / s;
  return out;
}

// ---------------------------------------------------------------------------
// OFF I/O
// ---------------------------------------------------------------------------

namespace {

std::string next_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    return tok;
  }
  throw std::invalid_argument("read_off: unexpected end of file");
}

double next_double(std::istream& in) { return std::stod(next_token(in)); }
int next_int(std::istream& in) { return std::stoi(next_token(in)); }

}  // namespace

ImmersedMesh read_off(std::istream& in) {
  if (next_token(in) != "OFF") throw std::invalid_argument("read_off: missing OFF header");
  const int nv = next_int(in), nf = next_int(in);
  next_int(in);  // edge count, ignored
  if (nv < 3 || nf < 1) throw std::invalid_argument("read_off: bad counts");
  ImmersedMesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    const double x = next_double(in), y = next_double(in), z = next_double(in);
    mesh.vertices.push_back(vec3(x, y, z));
  }
  mesh.faces.reserve(nf);
  for (int i = 0; i < nf; ++i) {
    if (next_int(in) != 3) throw std::invalid_argument("read_off: only triangles supported");
    const int a = next_int(in), b = next_int(in), c = next_int(in);
    mesh.faces.push_back({a, b, c});
  }
  mesh.finalize();
  return mesh;
}

void write_off(std::ostream& out, const ImmersedMesh& mesh) {
  for (const Vec& v : mesh.vertices)
    if (std::abs(v[3]) > 1e-12)
      throw std::invalid_argument("write_off: mesh has 4-dimensional coordinates");
  out << "OFF\n" << mesh.n_vertices() << ' ' << mesh.n_faces() << " 0\n";
  char buf[128];
  for (const Vec& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
    out << buf;
  }
  for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

ImmersedMesh read_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file " + path);
  return read_off(in);
}

void write_off_file(const std::string& path, const ImmersedMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  write_off(out, mesh);
}

// ---------------------------------------------------------------------------
// Geodesic distances (first-order fast marching)
// ---------------------------------------------------------------------------

namespace {

// Planar-wavefront update of the distance at C from triangle (A, B, C) with
// fixed values a, b.  Returns +inf when the update is not upwind-admissible.
double face_update(const Vec& xa, const Vec& xb, const Vec& xc, double a, double b) {
  const Vec e0 = xa - xc, e1 = xb - xc;
  const double q11 = e0.squaredNorm(), q12 = e0.dot(e1), q22 = e1.squaredNorm();
  const double det = q11 * q22 - q12 * q12;
  if (!(det > 0.0)) return kInf;
  // Q^{-1} applied to (1,1) and (a,b).
  const double i11 = q22 / det, i12 = -q12 / det, i22 = q11 / det;
  const double alpha = i11 + 2.0 * i12 + i22;
  const double beta = (i11 + i12) * a + (i12 + i22) * b;
  const double gamma = i11 * a * a + 2.0 * i12 * a * b + i22 * b * b - 1.0;
  const double disc = beta * beta - alpha * gamma;
  if (disc < 0.0) return kInf;
  const double t = (beta + std::sqrt(disc)) / alpha;
  if (t < std::max(a, b)) return kInf;
  const double w0 = i11 * (t - a) + i12 * (t - b);
  const double w1 = i12 * (t - a) + i22 * (t - b);
  if (w0 < 0.0 || w1 < 0.0) return kInf;
  return t;
}

}  // namespace

std::vector<double> geodesic_distances(const ImmersedMesh& mesh, int source) {
  const int nv = mesh.n_vertices();
  if (source < 0 || source >= nv) throw std::invalid_argument("geodesic_distances: bad source");

  std::vector<double> d(nv, kInf);
  std::vector<uint8_t> settled(nv, 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  d[source] = 0.0;
  heap.push({0.0, source});

  while (!heap.empty()) {
    const auto [dv, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = 1;

    for (int fi : mesh.vertex_faces[v]) {
      const auto& f = mesh.faces[fi];
      for (int k = 0; k < 3; ++k) {
        const int c = f[k];
        if (settled[c]) continue;
        const int p = f[(k + 1) % 3], q = f[(k + 2) % 3];
        double cand = kInf;
        if (std::isfinite(d[p]) && std::isfinite(d[q]))
          cand = face_update(mesh.vertices[p], mesh.vertices[q], mesh.vertices[c], d[p], d[q]);
        // Dijkstra edge fallback keeps the sweep consistent on obtuse fans.
        cand = std::min(cand, d[p] + (mesh.vertices[c] - mesh.vertices[p]).norm());
        cand = std::min(cand, d[q] + (mesh.vertices[c] - mesh.vertices[q]).norm());
        if (cand < d[c]) {
          d[c] = cand;
          heap.push({cand, c});
        }
      }
    }
  }
  return d;
}

}  // namespace wsi
