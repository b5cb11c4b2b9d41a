#include "glance/refine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glance/error.hpp"

namespace glance {

TensorRef score_edges(Tape& tape, const TensorRef& features,
                      const std::vector<std::pair<int, int>>& edges,
                      const AttentionParams& params) {
  const int f = features->cols;
  if (params.heads < 1) throw validation_error("attention needs at least one head");
  const auto& w = params.weight_vectors;
  if (w->rows != params.heads || w->cols != 2 * f) {
    throw validation_error("attention weights " + w->shape_str() + " do not match " +
                           std::to_string(params.heads) + " heads of width " +
                           std::to_string(2 * f));
  }
  const int m = static_cast<int>(edges.size());
  if (m == 0) throw validation_error("score_edges: empty edge list");

  std::vector<int> src(m), dst(m);
  for (int e = 0; e < m; ++e) {
    src[e] = std::min(edges[e].first, edges[e].second);
    dst[e] = std::max(edges[e].first, edges[e].second);
  }
  // [m x 2f] edge features, one matmul against all heads, then the head mean.
  auto edge_feats = concat_cols(tape, row_select(tape, features, src),
                                row_select(tape, features, dst));
  auto head_scores = sigmoid(tape, matmul(tape, edge_feats, transpose(tape, w)));
  auto alpha = scale(tape, matmul(tape, head_scores, ones(params.heads, 1)),
                     1.0 / params.heads);
  return alpha;  // [m x 1]
}

double quantile_threshold(const std::vector<double>& scores, double p) {
  if (scores.empty()) throw validation_error("quantile of an empty score list");
  if (p < 0.0 || p > 1.0) {
    throw validation_error("quantile p must lie in [0, 1], got " + std::to_string(p));
  }
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const long m = static_cast<long>(sorted.size());
  const long idx = std::max(0L, static_cast<long>(std::ceil(p * m)) - 1);
  return sorted[static_cast<std::size_t>(std::min(idx, m - 1))];
}

RefinedGraph prune(const Graph& g, const std::vector<double>& scores, double p, bool protect) {
  if (p < 0.0 || p > 0.95) {
    throw validation_error("prune quantile must lie in [0, 0.95], got " + std::to_string(p));
  }
  if (scores.size() != g.edges.size()) {
    throw validation_error("got " + std::to_string(scores.size()) + " scores for " +
                           std::to_string(g.edges.size()) + " edges");
  }

  RefinedGraph out;
  out.requested_quantile = p;
  if (g.edges.empty()) return out;
  out.threshold = quantile_threshold(scores, p);

  // Each node's best incident edge; ties resolved by the lower edge index.
  std::vector<int> best_edge(g.num_nodes, -1);
  for (int e = 0; e < g.num_edges(); ++e) {
    for (int node : {g.edges[e].first, g.edges[e].second}) {
      if (best_edge[node] < 0 || scores[e] > scores[best_edge[node]]) best_edge[node] = e;
    }
  }
  std::vector<char> protected_edge(g.edges.size(), 0);
  if (protect) {
    for (int node = 0; node < g.num_nodes; ++node) {
      if (best_edge[node] >= 0) protected_edge[best_edge[node]] = 1;
    }
  }

  for (int e = 0; e < g.num_edges(); ++e) {
    if (scores[e] >= out.threshold || protected_edge[e]) {
      out.kept_edges.push_back(g.edges[e]);
      out.kept_idx.push_back(e);
      out.scores.push_back(scores[e]);
    }
  }
  return out;
}

}  // namespace glance
