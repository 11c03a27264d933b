#pragma once

#include <functional>
#include <vector>

namespace wsi {

/// Finite greedy covering instance: n sites with a symmetric nonnegative
/// distance oracle, base radius alpha, and the proof parameters t > 2 and
/// beta in [2/t, 1) (so t*beta >= 2 and radius-R balls of selected centers
/// are automatically disjoint).  Layer radii are R_j = beta^j alpha.
struct CoverInstance {
  int n_points = 0;
  std::function<double(int, int)> distance;
  double alpha = 0.0;
  double t = 0.0;
  double beta = 0.0;

  static CoverInstance make(int n_points, std::function<double(int, int)> distance,
                            double alpha, double t, double beta);
  double layer_radius(int j) const;
};

/// Greedy selection: repeatedly take the smallest-index uncovered candidate
/// as a center and mark everything within t*beta*R as covered.  Guarantees
/// (i) every candidate lies within t*beta*R of a center and (ii) centers are
/// pairwise further than 2R apart.
std::vector<int> greedy_disjoint_cover(const CoverInstance& instance,
                                       const std::vector<int>& candidates, double R);

struct LayeredCover {
  std::vector<std::vector<int>> centers;  // per layer
  std::vector<double> radii;              // R_k per layer
  // point -> (layer, center) it is covered by: distance <= t*beta*R_layer.
  std::vector<std::pair<int, int>> assignment;
};

/// Runs the per-layer greedy construction: layer k covers from
/// D_k = A_k minus everything already covered by earlier layers.
/// layer_of[i] is the layer of point i, or -1 for points outside A.
LayeredCover layered_cover(const CoverInstance& instance, const std::vector<int>& layer_of);

}  // namespace wsi
