// Command-line front end: constants, inequality verification on OFF meshes,
// profile export, curve export, and the scenario runner.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "wsi/comparison.hpp"
#include "wsi/constants.hpp"
#include "wsi/covering.hpp"
#include "wsi/experiments.hpp"
#include "wsi/functionals.hpp"
#include "wsi/geometry.hpp"

namespace {

using nlohmann::ordered_json;

double parse_kappa(const std::string& text) {
  if (text == "auto") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(text);
}

wsi::WeightedAmbient parse_ambient(const std::string& text, const std::string& density) {
  const wsi::Density d = wsi::Density::by_name(density);
  if (text == "euclid3") return wsi::WeightedAmbient::euclidean(3, d);
  if (text.rfind("sphere3:", 0) == 0)
    return wsi::WeightedAmbient::sphere(3, std::stod(text.substr(8)), d);
  throw CLI::ValidationError("--ambient", "expected euclid3 or sphere3:B");
}

// Profile matching the model ambient: K = 0 (capped at r_max) or K = b^2.
wsi::ComparisonProfile ambient_profile(const wsi::WeightedAmbient& ambient, double r_max) {
  if (ambient.model == wsi::WeightedAmbient::Model::Euclidean)
    return wsi::closed_form_profile(wsi::CurvatureBound::zero(), r_max);
  return wsi::closed_form_profile(wsi::CurvatureBound::constant(ambient.b * ambient.b),
                                  std::min(r_max, M_PI / ambient.b));
}

// Default test function: a radial bump about the mesh centroid that vanishes
// before the boundary, or phi = 1 on closed meshes.
std::vector<double> default_phi(const wsi::ImmersedMesh& mesh) {
  if (mesh.boundary_edges.empty()) return std::vector<double>(mesh.n_vertices(), 1.0);
  wsi::Vec centroid = wsi::Vec::Zero();
  for (const auto& v : mesh.vertices) centroid += v;
  centroid /= mesh.n_vertices();
  double radius = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.is_boundary_vertex[v])
      radius = std::min(radius, (mesh.vertices[v] - centroid).norm());
  std::vector<double> phi(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double u = (mesh.vertices[v] - centroid).norm() / radius;
    phi[v] = std::max(0.0, 1.0 - u * u);
  }
  return phi;
}

ordered_json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

ordered_json hypotheses_json(const wsi::HypothesisReport& h) {
  ordered_json j;
  j["j_bar"] = json_number(h.j_bar);
  j["alpha_bar"] = json_number(h.alpha_bar);
  j["s0"] = json_number(h.s0);
  j["two_inj"] = json_number(h.two_inj);
  j["cond_a_holds"] = h.cond_a_holds;
  j["cond_b_holds"] = h.cond_b_holds;
  j["admissible"] = h.admissible;
  return j;
}

ordered_json inequality_json(const wsi::InequalityReport& rep) {
  ordered_json j;
  j["kind"] = rep.kind == wsi::InequalityReport::Kind::Sobolev ? "sobolev" : "isoperimetric";
  j["p"] = rep.p;
  j["lhs"] = json_number(rep.lhs);
  j["rhs"] = json_number(rep.rhs);
  j["ratio"] = json_number(rep.ratio);
  j["f_star"] = json_number(rep.f_star);
  ordered_json jc;
  jc["m"] = rep.constants.m;
  jc["kappa"] = rep.constants.kappa;
  jc["r0_over_s0"] = rep.constants.r0_over_s0;
  jc["omega_m"] = rep.constants.omega_m;
  jc["S"] = rep.constants.S;
  jc["S0"] = rep.constants.S0;
  jc["kappa_star"] = rep.constants.kappa_star;
  j["constants"] = jc;
  j["hypotheses"] = hypotheses_json(rep.hypotheses);
  ordered_json jm;
  jm["vertices"] = rep.mesh.n_vertices;
  jm["faces"] = rep.mesh.n_faces;
  jm["mesh_size"] = rep.mesh.mesh_size;
  j["mesh"] = jm;
  j["warnings"] = rep.warnings;
  return j;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of weighted Sobolev and isoperimetric inequalities"};
  app.require_subcommand(1);

  // --- constants ---
  auto* cmd_constants = app.add_subcommand("constants", "Sobolev constants for dimension m");
  int m = 2;
  std::string kappa_text = "auto";
  double ratio = 1.0;
  bool as_json = false;
  cmd_constants->add_option("--m", m, "intrinsic dimension (>= 2)");
  cmd_constants->add_option("--kappa", kappa_text, "kappa in (0,1), or 'auto' for kappa*");
  cmd_constants->add_option("--ratio", ratio, "r0/s0 ratio (>= 1)");
  cmd_constants->add_flag("--json", as_json, "print JSON");

  // --- verify ---
  auto* cmd_verify = app.add_subcommand("verify", "verify an inequality on a mesh");
  std::string verify_kind, mesh_path, ambient_text = "euclid3", density_text = "zero";
  std::string verify_kappa = "auto", json_out;
  double p_exp = 1.0, r_max = 10.0;
  cmd_verify->add_option("kind", verify_kind, "sobolev or isoper")->required();
  cmd_verify->add_option("--mesh", mesh_path, "OFF mesh file")->required();
  cmd_verify->add_option("--ambient", ambient_text, "euclid3 or sphere3:B");
  cmd_verify->add_option("--density", density_text, "zero|gaussian4|gaussian2");
  cmd_verify->add_option("--p", p_exp, "Sobolev exponent in [1, m)");
  cmd_verify->add_option("--kappa", verify_kappa, "kappa in (0,1), or 'auto'");
  cmd_verify->add_option("--r-max", r_max, "integration cap of the comparison profile");
  cmd_verify->add_option("--json", json_out, "JSON output path ('-' for stdout)");

  // --- profile ---
  auto* cmd_profile = app.add_subcommand("profile", "export a comparison profile as JSON");
  std::string curvature_text = "zero", profile_out;
  double prof_rmax = 10.0, prof_step = 1e-3;
  bool force_solve = false;
  cmd_profile->add_option("--curvature", curvature_text, "zero or constant:B2");
  cmd_profile->add_option("--r-max", prof_rmax, "integration cap");
  cmd_profile->add_option("--step", prof_step, "grid spacing");
  cmd_profile->add_flag("--solve", force_solve, "use the RK4 solver instead of the closed form");
  cmd_profile->add_option("--json", profile_out, "output path ('-' for stdout)");

  // --- curves ---
  auto* cmd_curves = app.add_subcommand("curves", "export phi/psi profile curves as CSV");
  std::string curves_mesh, curves_ambient = "euclid3", curves_density = "zero", csv_out;
  int xi = 0, n_grid = 64;
  double epsilon = 0.0, curves_rmax = 10.0;
  cmd_curves->add_option("--mesh", curves_mesh, "OFF mesh file")->required();
  cmd_curves->add_option("--ambient", curves_ambient, "euclid3 or sphere3:B");
  cmd_curves->add_option("--density", curves_density, "zero|gaussian4|gaussian2");
  cmd_curves->add_option("--xi", xi, "base vertex index");
  cmd_curves->add_option("--epsilon", epsilon, "smoothstep width (0 for sharp indicator)");
  cmd_curves->add_option("--grid", n_grid, "number of R samples");
  cmd_curves->add_option("--r-max", curves_rmax, "profile cap (Euclidean ambient)");
  cmd_curves->add_option("--csv", csv_out, "output path ('-' for stdout)");

  // --- scenario ---
  auto* cmd_scenario = app.add_subcommand("scenario", "run one named scenario");
  std::string scenario_name, scenario_json, scenario_csv, shape_text = "plane";
  int subdiv = 5, centers = 4, resolution = 0, plane_n = 192;
  double L = 6.0, b_inv = 1.0, extent = 4.0;
  cmd_scenario->add_option("name", scenario_name,
                           "self_shrinker|gaussian_plane|sphere_negative|end_growth")
      ->required();
  cmd_scenario->add_option("--subdiv", subdiv, "icosphere subdivisions");
  cmd_scenario->add_option("--L", L, "plane patch half-side");
  cmd_scenario->add_option("--n", plane_n, "plane patch resolution");
  cmd_scenario->add_option("--b", b_inv, "inverse sphere radius");
  cmd_scenario->add_option("--shape", shape_text, "end_growth shape: plane|cylinder");
  cmd_scenario->add_option("--extent", extent, "end_growth patch extent");
  cmd_scenario->add_option("--centers", centers, "end_growth separated center count");
  cmd_scenario->add_option("--resolution", resolution, "end_growth mesh resolution (0 = default)");
  cmd_scenario->add_option("--json", scenario_json, "JSON output path ('-' for stdout)");
  cmd_scenario->add_option("--csv", scenario_csv, "growth-curve CSV output path");

  // --- run-all ---
  auto* cmd_all = app.add_subcommand("run-all", "run a scenario suite from a config file");
  std::string config_path, suite_json;
  cmd_all->add_option("--config", config_path, "config file (default: built-in suite)");
  cmd_all->add_option("--json", suite_json, "JSON output path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_constants) {
      const auto c = wsi::make_sobolev_constants(m, parse_kappa(kappa_text), ratio);
      if (as_json) {
        ordered_json j;
        j["omega_m"] = c.omega_m;
        j["kappa"] = c.kappa;
        j["S"] = c.S;
        j["kappa_star"] = c.kappa_star;
        j["S0"] = c.S0;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "m = " << c.m << "  omega_m = " << c.omega_m << "\n"
                  << "kappa = " << c.kappa << "  S = " << c.S << "\n"
                  << "kappa* = " << c.kappa_star << "  S0 = " << c.S0 << "\n";
      }
      return 0;
    }

    if (*cmd_verify) {
      const auto ambient = parse_ambient(ambient_text, density_text);
      const auto mesh = wsi::read_off_file(mesh_path);
      wsi::validate_mesh_in_ambient(mesh, ambient);
      const auto profile = ambient_profile(ambient, r_max);
      const double kappa = parse_kappa(verify_kappa);
      wsi::InequalityReport rep;
      if (verify_kind == "sobolev") {
        rep = wsi::sobolev_sides(mesh, ambient, default_phi(mesh), p_exp, profile, kappa);
      } else if (verify_kind == "isoper") {
        rep = wsi::isoperimetric_sides(mesh, ambient, profile, kappa);
      } else {
        std::cerr << "unknown verify kind '" << verify_kind << "' (want sobolev or isoper)\n";
        return 2;
      }
      emit(inequality_json(rep).dump(2) + "\n", json_out.empty() ? "-" : json_out);
      const bool holds = !rep.hypotheses.admissible || rep.ratio <= 1.0;
      return holds ? 0 : 1;
    }

    if (*cmd_profile) {
      wsi::CurvatureBound k = wsi::CurvatureBound::zero();
      if (curvature_text.rfind("constant:", 0) == 0)
        k = wsi::CurvatureBound::constant(std::stod(curvature_text.substr(9)));
      else if (curvature_text != "zero")
        throw CLI::ValidationError("--curvature", "expected zero or constant:B2");
      const auto profile = force_solve ? wsi::solve_profile(k, prof_rmax, prof_step)
                                       : wsi::closed_form_profile(k, prof_rmax, prof_step);
      emit(wsi::profile_to_json(profile), profile_out.empty() ? "-" : profile_out);
      return 0;
    }

    if (*cmd_curves) {
      const auto ambient = parse_ambient(curves_ambient, curves_density);
      const auto mesh = wsi::read_off_file(curves_mesh);
      wsi::validate_mesh_in_ambient(mesh, ambient);
      const auto profile = ambient_profile(ambient, curves_rmax);
      const auto phi = default_phi(mesh);
      const double r_cap = 0.999 * std::min(ambient.injectivity_radius(), profile.r0);
      std::vector<double> grid;
      for (int i = 1; i <= n_grid; ++i) grid.push_back(r_cap * i / n_grid);
      const auto smoothing = epsilon > 0.0 ? wsi::SmoothingSpec::smoothstep(epsilon)
                                           : wsi::SmoothingSpec::indicator_limit();
      const auto curves = wsi::profile_curves(mesh, ambient, phi, xi, smoothing, grid);
      emit(wsi::curves_to_csv(curves), csv_out.empty() ? "-" : csv_out);
      return 0;
    }

    if (*cmd_scenario) {
      wsi::ScenarioReport rep;
      std::vector<wsi::GrowthCurve> curves;
      if (scenario_name == "self_shrinker") {
        rep = wsi::scenario_self_shrinker(subdiv);
      } else if (scenario_name == "gaussian_plane") {
        rep = wsi::scenario_gaussian_plane(L, plane_n);
      } else if (scenario_name == "sphere_negative") {
        rep = wsi::scenario_sphere_ambient_negative(b_inv);
      } else if (scenario_name == "end_growth") {
        const auto shape = shape_text == "cylinder" ? wsi::GrowthShape::Cylinder
                                                    : wsi::GrowthShape::Plane;
        auto result = wsi::scenario_end_growth(shape, extent, centers, resolution);
        rep = std::move(result.report);
        curves = std::move(result.curves);
      } else {
        std::cerr << "unknown scenario '" << scenario_name << "'\n";
        return 2;
      }
      emit(wsi::scenario_report_to_json(rep), scenario_json.empty() ? "-" : scenario_json);
      if (!scenario_csv.empty()) emit(wsi::growth_curves_to_csv(curves), scenario_csv);
      return rep.all_pass() ? 0 : 1;
    }

    if (*cmd_all) {
      std::string config = wsi::default_config();
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file " + config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        config = ss.str();
      }
      const auto suite = wsi::run_all(config);
      emit(wsi::suite_report_to_json(suite), suite_json.empty() ? "-" : suite_json);
      return suite.ok ? 0 : 1;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
