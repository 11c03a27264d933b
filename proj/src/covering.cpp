#include "wsi/covering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wsi {

CoverInstance CoverInstance::make(int n_points, std::function<double(int, int)> distance,
                                  double alpha, double t, double beta) {
  if (n_points < 1) throw std::invalid_argument("CoverInstance: need at least one point");
  if (!distance) throw std::invalid_argument("CoverInstance: missing distance oracle");
  if (!(alpha > 0.0)) throw std::invalid_argument("CoverInstance: alpha must be positive");
  if (!(t > 2.0)) throw std::invalid_argument("CoverInstance: t must exceed 2");
  if (!(beta >= 2.0 / t && beta < 1.0))
    throw std::invalid_argument("CoverInstance: beta must lie in [2/t, 1)");
  CoverInstance inst;
  inst.n_points = n_points;
  inst.distance = std::move(distance);
  inst.alpha = alpha;
  inst.t = t;
  inst.beta = beta;
  return inst;
}

double CoverInstance::layer_radius(int j) const {
  return std::pow(beta, j) * alpha;
}

namespace {

void validate_oracle(const CoverInstance& inst, const std::vector<int>& candidates) {
  for (int p : candidates) {
    if (p < 0 || p >= inst.n_points)
      throw std::invalid_argument("covering: candidate index out of range");
    if (std::abs(inst.distance(p, p)) > 0.0)
      throw std::invalid_argument("invalid-oracle: nonzero diagonal");
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    for (size_t j = i + 1; j < candidates.size(); ++j) {
      const double dij = inst.distance(candidates[i], candidates[j]);
      const double dji = inst.distance(candidates[j], candidates[i]);
      if (dij < 0.0 || dji < 0.0) throw std::invalid_argument("invalid-oracle: negative distance");
      if (std::abs(dij - dji) > 1e-12 * (1.0 + std::abs(dij)))
        throw std::invalid_argument("invalid-oracle: asymmetric distance");
    }
  }
}

}  // namespace

std::vector<int> greedy_disjoint_cover(const CoverInstance& instance,
                                       const std::vector<int>& candidates, double R) {
  if (candidates.empty()) throw std::invalid_argument("greedy_disjoint_cover: no candidates");
  if (!(R > 0.0)) throw std::invalid_argument("greedy_disjoint_cover: R must be positive");
  validate_oracle(instance, candidates);

  // Smallest-index tie-break keeps the selection deterministic.
  std::vector<int> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());

  const double cover_radius = instance.t * instance.beta * R;
  std::vector<int> centers;
  std::vector<char> covered(sorted.size(), 0);
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (covered[i]) continue;
    const int xi = sorted[i];
    centers.push_back(xi);
    for (size_t j = i; j < sorted.size(); ++j) {
      if (!covered[j] && instance.distance(xi, sorted[j]) <= cover_radius) covered[j] = 1;
    }
  }
  return centers;
}

LayeredCover layered_cover(const CoverInstance& instance, const std::vector<int>& layer_of) {
  if (static_cast<int>(layer_of.size()) != instance.n_points)
    throw std::invalid_argument("layered_cover: layer assignment size mismatch");

  int max_layer = -1;
  std::string unassigned;
  for (int i = 0; i < instance.n_points; ++i) {
    if (layer_of[i] < 0) {
      if (!unassigned.empty()) unassigned += ", ";
      unassigned += std::to_string(i);
    }
    max_layer = std::max(max_layer, layer_of[i]);
  }
  if (!unassigned.empty())
    throw std::invalid_argument("layered_cover: unassigned points: " + unassigned);

  LayeredCover out;
  out.assignment.assign(instance.n_points, {-1, -1});
  for (int k = 0; k <= max_layer; ++k) {
    const double R_k = instance.layer_radius(k);
    const double cover_radius = instance.t * instance.beta * R_k;

    // D_k: this layer's points minus everything covered by earlier layers.
    std::vector<int> d_k;
    for (int i = 0; i < instance.n_points; ++i)
      if (layer_of[i] == k && out.assignment[i].first < 0) d_k.push_back(i);

    out.radii.push_back(R_k);
    if (d_k.empty()) {
      out.centers.emplace_back();
      continue;
    }
    auto centers = greedy_disjoint_cover(instance, d_k, R_k);
    for (int xi : centers) {
      for (int i = 0; i < instance.n_points; ++i) {
        if (out.assignment[i].first < 0 && instance.distance(xi, i) <= cover_radius)
          out.assignment[i] = {k, xi};
      }
    }
    out.centers.push_back(std::move(centers));
  }

  for (int i = 0; i < instance.n_points; ++i) {
    if (out.assignment[i].first < 0)
      throw std::logic_error("layered_cover: point " + std::to_string(i) + " left uncovered");
  }
  return out;
}

}  // namespace wsi
