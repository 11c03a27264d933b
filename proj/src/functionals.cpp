#include "wsi/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One quadrature node: edge midpoint of a face, weight area/3.
struct QuadPoint {
  Vec pos;
  double weight;    // area/3 * e^{-f}
  double phi;       // PL interpolation
  double hf_norm;   // |H_f - grad f| interpolated as a scalar
  Vec hf_vec;       // H_f - grad f interpolated as a vector
  int face;
};

std::vector<QuadPoint> quad_points(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                   const std::vector<double>& phi, const AmbientFields& fields,
                                   const std::vector<Vec>* grad) {
  (void)grad;
  std::vector<QuadPoint> pts;
  pts.reserve(mesh.faces.size() * 3);
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const auto& f = mesh.faces[fi];
    const double w = mesh.face_area[fi] / 3.0;
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      QuadPoint q;
      q.face = fi;
      q.pos = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
      q.weight = w * std::exp(-ambient.f(q.pos));
      q.phi = 0.5 * (phi[a] + phi[b]);
      // Undefined (boundary) vertices contribute zero; phi vanishes there, so
      // the products below lose only O(mesh size).
      const double na = fields.Hf_minus_gradf.defined[a] ? fields.Hf_minus_gradf_norm[a] : 0.0;
      const double nb = fields.Hf_minus_gradf.defined[b] ? fields.Hf_minus_gradf_norm[b] : 0.0;
      q.hf_norm = 0.5 * (na + nb);
      const Vec va = fields.Hf_minus_gradf.defined[a] ? fields.Hf_minus_gradf.value[a] : Vec(Vec::Zero());
      const Vec vb = fields.Hf_minus_gradf.defined[b] ? fields.Hf_minus_gradf.value[b] : Vec(Vec::Zero());
      q.hf_vec = 0.5 * (va + vb);
      pts.push_back(q);
    }
  }
  return pts;
}

double support_f_star(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                      const std::vector<int>& faces) {
  double f_star = 0.0;
  bool any = false;
  for (int fi : faces) {
    const auto& f = mesh.faces[fi];
    for (int e = 0; e < 3; ++e) {
      const Vec mid = 0.5 * (mesh.vertices[f[e]] + mesh.vertices[f[(e + 1) % 3]]);
      const double val = ambient.f(mid);
      f_star = any ? std::max(f_star, val) : val;
      any = true;
    }
  }
  return any ? f_star : 0.0;
}

MeshStats mesh_stats(const ImmersedMesh& mesh) {
  return {mesh.n_vertices(), mesh.n_faces(), mesh.mesh_size};
}

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs == 0.0 ? 0.0 : kInf;
}

}  // namespace

SmoothingSpec SmoothingSpec::smoothstep(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("SmoothingSpec: epsilon must be positive");
  return {Kind::Smoothstep, epsilon};
}

SmoothingSpec SmoothingSpec::indicator_limit() { return {Kind::IndicatorLimit, 0.0}; }

double SmoothingSpec::lambda(double t) const {
  if (kind == Kind::IndicatorLimit) return t > 0.0 ? 1.0 : 0.0;
  if (t <= 0.0) return 0.0;
  if (t >= epsilon) return 1.0;
  const double u = t / epsilon;
  return u * u * (3.0 - 2.0 * u);
}

double SmoothingSpec::delta(double t) const { return lambda(t + epsilon); }

double ProfileCurves::phi_bar_at(double r) const {
  if (R.empty()) throw std::logic_error("ProfileCurves: empty grid");
  if (r <= R.front()) return phi_bar.front();
  if (r >= R.back()) return phi_bar.back();
  const auto it = std::upper_bound(R.begin(), R.end(), r);
  const size_t i = static_cast<size_t>(it - R.begin());
  const double u = (r - R[i - 1]) / (R[i] - R[i - 1]);
  return (1.0 - u) * phi_bar[i - 1] + u * phi_bar[i];
}

void validate_test_function(const ImmersedMesh& mesh, const std::vector<double>& phi) {
  if (static_cast<int>(phi.size()) != mesh.n_vertices())
    throw std::invalid_argument("test function size does not match mesh");
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (phi[v] < 0.0) throw std::invalid_argument("test function must be nonnegative");
    if (mesh.is_boundary_vertex[v] && phi[v] != 0.0)
      throw std::invalid_argument("test function must vanish on the boundary");
  }
}

InequalityReport sobolev_sides(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                               const std::vector<double>& phi, double p,
                               const ComparisonProfile& profile, double kappa,
                               const AmbientFields* fields) {
  validate_test_function(mesh, phi);
  const int m = mesh.m;
  if (!(p >= 1.0 && p < m))
    throw std::invalid_argument("sobolev_sides: p must lie in [1, m)");

  AmbientFields local;
  if (!fields) {
    local = compute_ambient_fields(mesh, ambient);
    fields = &local;
  }

  std::vector<int> supp_faces;
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const auto& f = mesh.faces[fi];
    if (phi[f[0]] > 0.0 || phi[f[1]] > 0.0 || phi[f[2]] > 0.0) supp_faces.push_back(fi);
  }

  InequalityReport rep;
  rep.kind = InequalityReport::Kind::Sobolev;
  rep.p = p;
  rep.mesh = mesh_stats(mesh);
  rep.f_star = support_f_star(mesh, ambient, supp_faces);

  const double vol_supp = f_volume_faces(mesh, ambient, supp_faces);
  const double lhs_exp = m * p / (m - p);
  if (lhs_exp > 6.0)
    rep.warnings.push_back("LHS exponent mp/(m-p) exceeds 6; expect quadrature degradation");

  const auto grad = face_gradient(mesh, phi);
  const auto pts = quad_points(mesh, ambient, phi, *fields, &grad);
  double lhs_int = 0.0, rhs_int = 0.0;
  for (const auto& q : pts) {
    lhs_int += q.weight * std::pow(q.phi, lhs_exp);
    rhs_int += q.weight * std::pow(grad[q.face].norm() + q.phi * q.hf_norm, p);
  }

  rep.constants = make_sobolev_constants(m, kappa, profile.r0_over_s0());
  rep.lhs = std::pow(lhs_int, (m - p) / m);
  rep.rhs = rep.constants.S * std::exp(rep.f_star / m) * rhs_int;
  rep.ratio = safe_ratio(rep.lhs, rep.rhs);
  rep.hypotheses = check_hypotheses(
      profile, j_bar(m, rep.constants.kappa, rep.f_star, vol_supp), ambient.injectivity_radius());
  if (!rep.hypotheses.admissible)
    rep.warnings.push_back("hypotheses not admissible; the inequality is not asserted");
  return rep;
}

InequalityReport isoperimetric_sides(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                     const ComparisonProfile& profile, double kappa,
                                     const AmbientFields* fields) {
  AmbientFields local;
  if (!fields) {
    local = compute_ambient_fields(mesh, ambient);
    fields = &local;
  }
  const int m = mesh.m;

  InequalityReport rep;
  rep.kind = InequalityReport::Kind::Isoperimetric;
  rep.p = 1.0;
  rep.mesh = mesh_stats(mesh);

  std::vector<int> faces(mesh.n_faces());
  std::iota(faces.begin(), faces.end(), 0);
  rep.f_star = support_f_star(mesh, ambient, faces);

  const double vol = f_volume(mesh, ambient);
  const std::vector<double> ones(mesh.n_vertices(), 1.0);
  const auto pts = quad_points(mesh, ambient, ones, *fields, nullptr);
  double hf_int = 0.0;
  for (const auto& q : pts) hf_int += q.weight * q.hf_norm;

  rep.constants = make_sobolev_constants(m, kappa, profile.r0_over_s0());
  rep.lhs = std::pow(vol, (m - 1.0) / m);
  rep.rhs = rep.constants.S * std::exp(rep.f_star / m) *
            (boundary_f_volume(mesh, ambient) + hf_int);
  rep.ratio = safe_ratio(rep.lhs, rep.rhs);
  rep.hypotheses = check_hypotheses(profile, j_bar(m, rep.constants.kappa, rep.f_star, vol),
                                    ambient.injectivity_radius());
  if (!rep.hypotheses.admissible)
    rep.warnings.push_back("hypotheses not admissible; the inequality is not asserted");
  return rep;
}

ProfileCurves profile_curves(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                             const std::vector<double>& phi, int xi,
                             const SmoothingSpec& smoothing, std::vector<double> R_grid,
                             const AmbientFields* fields) {
  validate_test_function(mesh, phi);
  if (xi < 0 || xi >= mesh.n_vertices())
    throw std::invalid_argument("profile_curves: xi is not a mesh vertex");
  if (!(phi[xi] > 0.0)) throw std::invalid_argument("profile_curves: xi must lie in supp(phi)");
  if (R_grid.empty()) throw std::invalid_argument("profile_curves: empty R grid");
  for (size_t i = 0; i + 1 < R_grid.size(); ++i)
    if (!(R_grid[i] < R_grid[i + 1]))
      throw std::invalid_argument("profile_curves: R grid must be strictly increasing");
  if (!(R_grid.front() > 0.0)) throw std::invalid_argument("profile_curves: R grid must be positive");

  AmbientFields local;
  if (!fields) {
    local = compute_ambient_fields(mesh, ambient);
    fields = &local;
  }

  const auto grad = face_gradient(mesh, phi);
  const auto pts = quad_points(mesh, ambient, phi, *fields, &grad);
  const Vec& xi_pos = mesh.vertices[xi];

  struct Entry {
    double r, phi_w, lem_w;
  };
  std::vector<Entry> entries;
  entries.reserve(pts.size());
  for (const auto& q : pts) {
    Entry e;
    e.r = ambient_distance(ambient, xi_pos, q.pos);
    e.phi_w = q.weight * q.phi;
    e.lem_w = q.weight * (grad[q.face] + q.phi * q.hf_vec).norm();
    entries.push_back(e);
  }

  ProfileCurves curves;
  curves.xi = xi;
  curves.m = mesh.m;
  curves.mesh_size = mesh.mesh_size;
  curves.smoothing = smoothing;
  curves.R = std::move(R_grid);
  const size_t n = curves.R.size();
  curves.phi.assign(n, 0.0);
  curves.psi.assign(n, 0.0);
  curves.phi_bar.assign(n, 0.0);
  curves.psi_bar.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double R = curves.R[i];
    double cphi = 0.0, cpsi = 0.0, cphib = 0.0, cpsib = 0.0;
    for (const auto& e : entries) {
      const double lam = smoothing.lambda(R - e.r);
      if (lam > 0.0) {
        cphi += lam * e.phi_w;
        cpsi += lam * e.lem_w;
      }
      if (e.r < R) {
        cphib += e.phi_w;
        cpsib += e.lem_w;
      }
    }
    curves.phi[i] = cphi;
    curves.psi[i] = cpsi;
    curves.phi_bar[i] = cphib;
    curves.psi_bar[i] = cpsib;
  }
  return curves;
}

Lemma41Result lemma41_residual(const ProfileCurves& curves, const ComparisonProfile& profile,
                               int m) {
  const size_t n = curves.R.size();
  if (n < 3) throw std::invalid_argument("lemma41_residual: need at least 3 grid points");
  if (curves.R.back() > profile.r0 + 1e-9 * std::max(1.0, profile.r0))
    throw std::invalid_argument("lemma41_residual: grid exceeds r0");

  std::vector<double> y(n), z(n);
  double sup = 0.0, spacing = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double hm = std::pow(eval_h(profile, curves.R[i]), -m);
    y[i] = hm * curves.phi[i];
    z[i] = hm * curves.psi[i];
    sup = std::max({sup, y[i], z[i]});
    if (i) spacing = std::max(spacing, curves.R[i] - curves.R[i - 1]);
  }

  Lemma41Result res;
  res.max_residual = -kInf;
  for (size_t i = 1; i + 1 < n; ++i) {
    const double dy = (y[i + 1] - y[i - 1]) / (curves.R[i + 1] - curves.R[i - 1]);
    const double resid = -dy - z[i];
    if (resid > res.max_residual) {
      res.max_residual = resid;
      res.arg_R = curves.R[i];
    }
  }
  res.tol = 5.0 * (curves.mesh_size + spacing) * sup;
  res.pass = res.max_residual <= res.tol;
  return res;
}

Lemma42Instance lemma42_instance(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                 const std::vector<double>& phi, int xi, double kappa,
                                 double t, const ComparisonProfile& profile,
                                 const AmbientFields* fields) {
  validate_test_function(mesh, phi);
  AmbientFields local;
  if (!fields) {
    local = compute_ambient_fields(mesh, ambient);
    fields = &local;
  }
  std::vector<int> supp_faces;
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const auto& f = mesh.faces[fi];
    if (phi[f[0]] > 0.0 || phi[f[1]] > 0.0 || phi[f[2]] > 0.0) supp_faces.push_back(fi);
  }
  const double f_star = support_f_star(mesh, ambient, supp_faces);
  const auto pts = quad_points(mesh, ambient, phi, *fields, nullptr);
  double phi_int = 0.0;
  for (const auto& q : pts) phi_int += q.weight * q.phi;

  Lemma42Instance inst;
  inst.kappa = kappa;
  inst.t = t;
  inst.J = j_bar(mesh.m, kappa, f_star, phi_int);
  inst.alpha = (inst.J > 0.0 && inst.J < profile.s0)
                   ? invert_h(profile, inst.J)
                   : std::numeric_limits<double>::quiet_NaN();
  inst.phi_at_xi = phi[xi];
  inst.R0 = std::min(ambient.injectivity_radius(), profile.r0);
  return inst;
}

std::optional<double> lemma42_witness(const ProfileCurves& curves,
                                      const Lemma42Instance& inst, int m) {
  if (!(inst.phi_at_xi >= 1.0))
    throw std::invalid_argument("lemma42_witness: precondition phi(xi) >= 1 fails");
  if (!(inst.J > 0.0) || std::isnan(inst.alpha))
    throw std::invalid_argument("lemma42_witness: precondition 0 < J < s0 fails");
  if (!(inst.t > 1.0)) throw std::invalid_argument("lemma42_witness: precondition t > 1 fails");
  if (!(inst.t * inst.alpha <= inst.R0))
    throw std::invalid_argument("lemma42_witness: precondition t*alpha <= min(Inj, r0) fails");
  if (curves.R.back() + 1e-12 < inst.t * inst.alpha)
    throw std::invalid_argument("lemma42_witness: curve grid must cover t*alpha");

  const double coeff = 2.0 * inst.alpha / inst.kappa * std::pow(inst.t, m - 1);
  for (size_t i = 0; i < curves.R.size(); ++i) {
    const double R = curves.R[i];
    if (!(R < inst.alpha)) break;
    if (curves.phi_bar_at(inst.t * R) <= coeff * curves.psi_bar[i]) return R;
  }
  return std::nullopt;
}

HessianaResult hessiana_check(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                              const Vec& xi, const ComparisonProfile& profile,
                              const AmbientFields* fields) {
  AmbientFields local;
  if (!fields) {
    local = compute_ambient_fields(mesh, ambient);
    fields = &local;
  }
  const int m = mesh.m;
  const double r_lim = std::min(ambient.injectivity_radius(), profile.r0);

  HessianaResult res;
  res.min_gap = kInf;
  double max_hf = 0.0;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (fields->Hf_minus_gradf.defined[v])
      max_hf = std::max(max_hf, fields->Hf_minus_gradf_norm[v]);

  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const auto& f = mesh.faces[fi];
    const Vec &a = mesh.vertices[f[0]], &b = mesh.vertices[f[1]], &c = mesh.vertices[f[2]];
    const Vec cen = (a + b + c) / 3.0;
    const double r = ambient_distance(ambient, xi, cen);
    if (!(r > 1e-12) || r >= r_lim) {
      ++res.excluded_faces;
      continue;
    }

    Vec e1, e2;
    {
      Vec u = b - a, v = c - a;
      e1 = u.normalized();
      Vec w = v - v.dot(e1) * e1;
      e2 = w.normalized();
    }

    const double h = eval_h(profile, r);
    const double hp = eval_h_prime(profile, r);

    double div = 0.0;
    Vec grad_r = Vec::Zero();
    if (ambient.model == WeightedAmbient::Model::Euclidean) {
      grad_r = (cen - xi) / r;
      const double sumsq = std::pow(grad_r.dot(e1), 2) + std::pow(grad_r.dot(e2), 2);
      div = hp * sumsq + h / r * (m - sumsq);
    } else {
      // Jacobian of the scale-invariant extension of X = h(r) grad r off the
      // sphere, evaluated at the face centroid (which lies slightly inside).
      const double rho = 1.0 / ambient.b;
      const double pn = cen.norm();
      const Vec p_hat = cen / pn;
      const Vec u_hat = xi.normalized();
      const double cth = std::clamp(u_hat.dot(p_hat), -1.0, 1.0);
      const Vec w_dir = cth * p_hat - u_hat;
      const double sth = w_dir.norm();
      if (sth < 1e-12) {
        ++res.excluded_faces;
        continue;
      }
      grad_r = w_dir / sth;
      double sum_w2 = 0.0, sum_p2 = 0.0, sum_pw = 0.0;
      for (const Vec* e : {&e1, &e2}) {
        sum_w2 += std::pow(grad_r.dot(*e), 2);
        sum_p2 += std::pow(p_hat.dot(*e), 2);
        sum_pw += p_hat.dot(*e) * grad_r.dot(*e);
      }
      div = rho * hp / pn * sum_w2 + h * cth / (sth * pn) * (m - sum_p2 - sum_w2) -
            h / pn * sum_pw;
    }

    Vec hf = Vec::Zero();
    int defined = 0;
    for (int v : f) {
      if (fields->Hf_minus_gradf.defined[v]) {
        hf += fields->Hf_minus_gradf.value[v];
        ++defined;
      }
    }
    if (defined > 0) hf /= defined;

    const double lhs = div + hf.dot(h * grad_r);
    const double rhs = m * hp + h * hf.dot(grad_r);
    res.min_gap = std::min(res.min_gap, lhs - rhs);
  }

  if (!std::isfinite(res.min_gap)) res.min_gap = 0.0;  // every face excluded
  res.tol = 5.0 * mesh.mesh_size * (1.0 + max_hf);
  res.pass = res.min_gap >= -res.tol;
  return res;
}

LevelsetResult levelset_identity_check(const ImmersedMesh& mesh, const WeightedAmbient& ambient,
                                       const std::vector<double>& phi, int n_levels) {
  validate_test_function(mesh, phi);
  if (n_levels < 2) throw std::invalid_argument("levelset_identity_check: n_levels too small");
  const int m = mesh.m;
  const double ex = static_cast<double>(m) / (m - 1);

  const auto fields = compute_ambient_fields(mesh, ambient);
  const auto pts = quad_points(mesh, ambient, phi, fields, nullptr);

  LevelsetResult res;
  double phi_max = 0.0;
  for (const auto& q : pts) {
    res.rhs += q.weight * std::pow(q.phi, ex);
    phi_max = std::max(phi_max, q.phi);
  }
  res.rhs *= (m - 1.0) / m;
  if (phi_max == 0.0) return res;

  // vol_f({phi >= s}) from a descending sort + prefix sums.
  std::vector<std::pair<double, double>> vals;
  vals.reserve(pts.size());
  for (const auto& q : pts) vals.emplace_back(q.phi, q.weight);
  std::sort(vals.begin(), vals.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<double> prefix(vals.size() + 1, 0.0);
  for (size_t i = 0; i < vals.size(); ++i) prefix[i + 1] = prefix[i] + vals[i].second;
  auto vol_at = [&](double s) {
    // Count of quad points with phi >= s.
    size_t lo = 0, hi = vals.size();
    while (lo < hi) {
      const size_t mid = (lo + hi) / 2;
      if (vals[mid].first >= s)
        lo = mid + 1;
      else
        hi = mid;
    }
    return prefix[lo];
  };

  const double ds = phi_max / n_levels;
  for (int j = 0; j < n_levels; ++j) {
    const double s = (j + 0.5) * ds;
    res.lhs += ds * std::pow(s, 1.0 / (m - 1)) * vol_at(s);
  }
  res.rel_error = std::abs(res.lhs - res.rhs) / std::max(res.rhs, 1e-300);
  return res;
}

std::string curves_to_csv(const ProfileCurves& curves) {
  std::string out = "R,phi,psi,phi_bar,psi_bar\n";
  for (size_t i = 0; i < curves.R.size(); ++i) {
    out += fmt17(curves.R[i]) + "," + fmt17(curves.phi[i]) + "," + fmt17(curves.psi[i]) + "," +
           fmt17(curves.phi_bar[i]) + "," + fmt17(curves.psi_bar[i]) + "\n";
  }
  return out;
}

}  // namespace wsi
