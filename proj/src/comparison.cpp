#include "wsi/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace wsi {

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

CurvatureBound CurvatureBound::zero() {
  CurvatureBound k;
  k.kind_ = Kind::Zero;
  return k;
}

CurvatureBound CurvatureBound::constant(double b_squared) {
  if (!(b_squared > 0.0) || !std::isfinite(b_squared))
    throw std::invalid_argument("CurvatureBound::constant: b^2 must be positive and finite");
  CurvatureBound k;
  k.kind_ = Kind::Constant;
  k.b_squared_ = b_squared;
  return k;
}

CurvatureBound CurvatureBound::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.empty())
    throw std::invalid_argument("CurvatureBound::tabulated: no samples");
  if (samples.front().first != 0.0)
    throw std::invalid_argument("CurvatureBound::tabulated: samples must start at t = 0");
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].second < 0.0)
      throw std::invalid_argument("CurvatureBound::tabulated: negative K value");
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("CurvatureBound::tabulated: t samples must be strictly increasing");
  }
  CurvatureBound k;
  k.kind_ = Kind::Tabulated;
  k.samples_ = std::move(samples);
  return k;
}

double CurvatureBound::operator()(double t) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return b_squared_;
    case Kind::Tabulated: {
      if (t <= samples_.front().first) return samples_.front().second;
      if (t >= samples_.back().first) return samples_.back().second;
      auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                 [](double v, const std::pair<double, double>& s) { return v < s.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double u = (t - lo.first) / (hi.first - lo.first);
      return (1.0 - u) * lo.second + u * hi.second;
    }
  }
  return 0.0;
}

namespace {

struct State {
  double h, hp;
};

State rhs(const CurvatureBound& k, double t, const State& y) {
  return {y.hp, -k(t) * y.h};
}

State rk4_step(const CurvatureBound& k, double t, const State& y, double dt) {
  const State k1 = rhs(k, t, y);
  const State k2 = rhs(k, t + 0.5 * dt, {y.h + 0.5 * dt * k1.h, y.hp + 0.5 * dt * k1.hp});
  const State k3 = rhs(k, t + 0.5 * dt, {y.h + 0.5 * dt * k2.h, y.hp + 0.5 * dt * k2.hp});
  const State k4 = rhs(k, t + dt, {y.h + dt * k3.h, y.hp + dt * k3.hp});
  return {y.h + dt / 6.0 * (k1.h + 2.0 * (k2.h + k3.h) + k4.h),
          y.hp + dt / 6.0 * (k1.hp + 2.0 * (k2.hp + k3.hp) + k4.hp)};
}

// Cubic Hermite of h' on one grid cell, using h'' = -K h at the endpoints.
double hermite_hp(const ComparisonProfile& p, size_t i, double tt) {
  const double dt = p.t[i + 1] - p.t[i];
  const double u = (tt - p.t[i]) / dt;
  const double d0 = -p.curvature(p.t[i]) * p.h[i];
  const double d1 = -p.curvature(p.t[i + 1]) * p.h[i + 1];
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p.hp[i] + (u3 - 2 * u2 + u) * dt * d0 +
         (-2 * u3 + 3 * u2) * p.hp[i + 1] + (u3 - u2) * dt * d1;
}

double hermite_h(const ComparisonProfile& p, size_t i, double tt) {
  const double dt = p.t[i + 1] - p.t[i];
  const double u = (tt - p.t[i]) / dt;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * p.h[i] + (u3 - 2 * u2 + u) * dt * p.hp[i] +
         (-2 * u3 + 3 * u2) * p.h[i + 1] + (u3 - u2) * dt * p.hp[i + 1];
}

size_t cell_index(const ComparisonProfile& p, double tt) {
  const size_t n = p.t.size();
  double pos = tt / p.step;
  auto i = static_cast<size_t>(std::max(0.0, std::floor(pos)));
  if (i >= n - 1) i = n - 2;
  return i;
}

}  // namespace

ComparisonProfile solve_profile(const CurvatureBound& curvature, double r_max, double step) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw std::invalid_argument("solve_profile: r_max must be positive");
  if (!(step > 0.0) || !std::isfinite(step))
    throw std::invalid_argument("solve_profile: step must be positive");
  if (!(step < r_max))
    throw std::invalid_argument("solve_profile: step must be smaller than r_max");

  const auto n_steps = static_cast<size_t>(std::ceil(r_max / step - 1e-12));
  const double dt = r_max / static_cast<double>(n_steps);

  ComparisonProfile p;
  p.curvature = curvature;
  p.step = dt;
  p.r_max = r_max;
  p.t.reserve(n_steps + 1);
  p.h.reserve(n_steps + 1);
  p.hp.reserve(n_steps + 1);

  State y{0.0, 1.0};
  p.t.push_back(0.0);
  p.h.push_back(y.h);
  p.hp.push_back(y.hp);
  for (size_t i = 0; i < n_steps; ++i) {
    const double ti = static_cast<double>(i) * dt;
    y = rk4_step(curvature, ti, y, dt);
    p.t.push_back(static_cast<double>(i + 1) * dt);
    p.h.push_back(y.h);
    p.hp.push_back(y.hp);
  }

  // First zero of h' by sign change, refined by bisection to tolerance step^2.
  size_t cross = 0;
  for (size_t i = 1; i < p.hp.size(); ++i) {
    if (p.hp[i] <= 0.0) {
      cross = i;
      break;
    }
  }
  if (cross == 0) {
    p.is_capped = true;
    p.r0 = r_max;
    p.s0 = p.h.back();
    return p;
  }
  if (p.hp[cross] == 0.0) {
    p.r0 = p.t[cross];
    p.s0 = p.h[cross];
    return p;
  }
  double a = p.t[cross - 1], b_t = p.t[cross];
  const double tol = dt * dt;
  while (b_t - a > tol) {
    const double mid = 0.5 * (a + b_t);
    if (hermite_hp(p, cross - 1, mid) > 0.0)
      a = mid;
    else
      b_t = mid;
  }
  p.r0 = 0.5 * (a + b_t);
  p.s0 = hermite_h(p, cross - 1, p.r0);
  return p;
}

ComparisonProfile closed_form_profile(const CurvatureBound& curvature, double r_max, double step) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw std::invalid_argument("closed_form_profile: r_max must be positive");
  if (curvature.kind() == CurvatureBound::Kind::Tabulated)
    throw std::invalid_argument("closed_form_profile: unsupported variant (Tabulated)");
  if (step <= 0.0) step = r_max / 4096.0;

  const auto n_steps = static_cast<size_t>(std::ceil(r_max / step - 1e-12));
  const double dt = r_max / static_cast<double>(n_steps);

  ComparisonProfile p;
  p.curvature = curvature;
  p.step = dt;
  p.r_max = r_max;

  if (curvature.kind() == CurvatureBound::Kind::Zero) {
    p.analytic = ComparisonProfile::Analytic::Linear;
    for (size_t i = 0; i <= n_steps; ++i) {
      const double ti = static_cast<double>(i) * dt;
      p.t.push_back(ti);
      p.h.push_back(ti);
      p.hp.push_back(1.0);
    }
    p.is_capped = true;
    p.r0 = r_max;
    p.s0 = r_max;
    return p;
  }

  const double b = std::sqrt(curvature.b_squared());
  p.analytic = ComparisonProfile::Analytic::Sine;
  p.b = b;
  for (size_t i = 0; i <= n_steps; ++i) {
    const double ti = static_cast<double>(i) * dt;
    p.t.push_back(ti);
    p.h.push_back(std::sin(b * ti) / b);
    p.hp.push_back(std::cos(b * ti));
  }
  const double r0_exact = M_PI / (2.0 * b);
  if (r0_exact > r_max) {
    p.is_capped = true;
    p.r0 = r_max;
    p.s0 = std::sin(b * r_max) / b;
  } else {
    p.r0 = r0_exact;
    p.s0 = 1.0 / b;
  }
  return p;
}

double eval_h(const ComparisonProfile& p, double t) {
  const double slack = 1e-9 * std::max(1.0, p.r0);
  if (t < -slack || t > p.r0 + slack)
    throw std::out_of_range("eval_h: t outside [0, r0]");
  t = std::clamp(t, 0.0, p.r0);
  switch (p.analytic) {
    case ComparisonProfile::Analytic::Linear:
      return t;
    case ComparisonProfile::Analytic::Sine:
      return std::sin(p.b * t) / p.b;
    case ComparisonProfile::Analytic::None:
      break;
  }
  if (t == 0.0) return 0.0;
  return hermite_h(p, cell_index(p, t), t);
}

double eval_h_prime(const ComparisonProfile& p, double t) {
  const double slack = 1e-9 * std::max(1.0, p.r0);
  if (t < -slack || t > p.r0 + slack)
    throw std::out_of_range("eval_h_prime: t outside [0, r0]");
  t = std::clamp(t, 0.0, p.r0);
  switch (p.analytic) {
    case ComparisonProfile::Analytic::Linear:
      return 1.0;
    case ComparisonProfile::Analytic::Sine:
      return std::cos(p.b * t);
    case ComparisonProfile::Analytic::None:
      break;
  }
  const size_t i = cell_index(p, t);
  const double u = (t - p.t[i]) / (p.t[i + 1] - p.t[i]);
  return (1.0 - u) * p.hp[i] + u * p.hp[i + 1];
}

double invert_h(const ComparisonProfile& p, double s) {
  const double slack = 1e-12 * std::max(1.0, p.s0);
  if (s < -slack || s > p.s0 + slack)
    throw std::out_of_range("invert_h: s outside [0, s0]");
  s = std::clamp(s, 0.0, p.s0);
  if (s == 0.0) return 0.0;
  switch (p.analytic) {
    case ComparisonProfile::Analytic::Linear:
      return s;
    case ComparisonProfile::Analytic::Sine:
      return std::asin(std::min(1.0, p.b * s)) / p.b;
    case ComparisonProfile::Analytic::None:
      break;
  }
  double lo = 0.0, hi = p.r0;
  const double s_tol = 1e-10 * p.s0;
  const double t_tol = std::max(1e-13, 1e-12 * p.r0);
  while (hi - lo > t_tol) {
    const double mid = 0.5 * (lo + hi);
    const double hm = eval_h(p, mid);
    if (std::abs(hm - s) <= s_tol) return mid;
    if (hm < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string profile_to_json(const ComparisonProfile& p) {
  std::string out = "{\n  \"curvature\": ";
  switch (p.curvature.kind()) {
    case CurvatureBound::Kind::Zero:
      out += "{\"variant\": \"zero\"}";
      break;
    case CurvatureBound::Kind::Constant:
      out += "{\"variant\": \"constant\", \"b_squared\": " + fmt17(p.curvature.b_squared()) + "}";
      break;
    case CurvatureBound::Kind::Tabulated: {
      out += "{\"variant\": \"tabulated\", \"samples\": [";
      const auto& s = p.curvature.samples();
      for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += "[" + fmt17(s[i].first) + ", " + fmt17(s[i].second) + "]";
      }
      out += "]}";
      break;
    }
  }
  out += ",\n  \"step\": " + fmt17(p.step);
  out += ",\n  \"r0\": " + fmt17(p.r0);
  out += ",\n  \"s0\": " + fmt17(p.s0);
  out += ",\n  \"is_capped\": ";
  out += p.is_capped ? "true" : "false";
  out += ",\n  \"grid\": [";
  for (size_t i = 0; i < p.t.size(); ++i) {
    if (i) out += ",";
    out += "\n    [" + fmt17(p.t[i]) + ", " + fmt17(p.h[i]) + ", " + fmt17(p.hp[i]) + "]";
  }
  out += "\n  ]\n}\n";
  return out;
}

ComparisonProfile profile_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ComparisonProfile p;
  const auto& jc = j.at("curvature");
  const std::string variant = jc.at("variant").get<std::string>();
  if (variant == "zero") {
    p.curvature = CurvatureBound::zero();
  } else if (variant == "constant") {
    p.curvature = CurvatureBound::constant(jc.at("b_squared").get<double>());
  } else if (variant == "tabulated") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& s : jc.at("samples"))
      samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
    p.curvature = CurvatureBound::tabulated(std::move(samples));
  } else {
    throw std::invalid_argument("profile_from_json: unknown curvature variant " + variant);
  }
  p.step = j.at("step").get<double>();
  p.r0 = j.at("r0").get<double>();
  p.s0 = j.at("s0").get<double>();
  p.is_capped = j.at("is_capped").get<bool>();
  for (const auto& row : j.at("grid")) {
    p.t.push_back(row.at(0).get<double>());
    p.h.push_back(row.at(1).get<double>());
    p.hp.push_back(row.at(2).get<double>());
  }
  if (p.t.size() < 2) throw std::invalid_argument("profile_from_json: grid too short");
  p.r_max = p.t.back();
  return p;
}

}  // namespace wsi
