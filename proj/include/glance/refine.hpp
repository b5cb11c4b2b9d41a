#pragma once

#include <utility>
#include <vector>

#include "glance/graph.hpp"
#include "glance/tensor.hpp"

namespace glance {

// Multi-head edge attention parameters: one weight vector of length 2*f per
// head, stored row-wise.
struct AttentionParams {
  int heads = 0;
  TensorRef weight_vectors;  // [heads x 2f]
};

struct RefinedGraph {
  std::vector<std::pair<int, int>> kept_edges;
  std::vector<int> kept_idx;     // indices into the original edge list
  std::vector<double> scores;    // score per kept edge
  double threshold = 0.0;
  double requested_quantile = 0.0;
};

// Mean over heads of sigmoid(w_h . [x_i || x_j]) per edge, with edges in
// canonical i<j orientation. Returns an [m x 1] tensor on the tape,
// differentiable w.r.t. both features and weights.
TensorRef score_edges(Tape& tape, const TensorRef& features,
                      const std::vector<std::pair<int, int>>& edges,
                      const AttentionParams& params);

// Nearest-rank lower quantile: sort ascending and take the element at index
// max(0, ceil(p*m) - 1).
double quantile_threshold(const std::vector<double>& scores, double p);

// Drops edges scoring below the p-quantile threshold, except that every
// node's highest-scoring incident edge survives so no node is isolated.
// `protect` is a test hook for the property suite.
RefinedGraph prune(const Graph& g, const std::vector<double>& scores, double p,
                   bool protect = true);

}  // namespace glance
