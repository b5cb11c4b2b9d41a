#pragma once

#include <cstdint>
#include <vector>

#include "glance/tensor.hpp"

namespace glance {

struct Clustering {
  int k = 0;
  Tensor centroids;             // [k x f]
  std::vector<int> assignment;  // cluster index per row of the input
  double inertia = 0.0;         // total within-cluster squared distance
  int iterations_run = 0;
  std::vector<double> inertia_trace;  // one entry per Lloyd iteration
};

// Seeded k-means++ initialization followed by Lloyd iterations. Stops when
// the largest centroid movement falls below `tol` or after `max_iter`
// rounds. Emptied clusters are reseeded to the point farthest from its
// assigned centroid. Deterministic per (features, k, seed).
Clustering kmeans(const Tensor& features, int k, std::uint64_t seed, int max_iter = 50,
                  double tol = 1e-7);

// Row i = centroid of row i's cluster. Not differentiable; the clustering is
// treated as fixed within an epoch.
Tensor cluster_features(const Tensor& features, const Clustering& c);

}  // namespace glance
