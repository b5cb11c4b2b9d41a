#pragma once

#include <string>
#include <utility>
#include <vector>

#include "glance/tensor.hpp"

namespace glance {

// Undirected graph with node features and labels. Edges are stored
// deduplicated in canonical (i < j) order; self-loops are rejected. The
// validated Graph is the single source of structural truth and is immutable
// after load.
struct Graph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;
  Tensor features;               // [num_nodes x d]
  std::vector<int> labels;       // values in [0, num_classes)
  int num_classes = 0;

  int feature_dim() const { return features.cols; }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

// Neighbor lists with the incident edge index, built once where needed.
struct Adjacency {
  // per node: (neighbor, edge index into Graph::edges)
  std::vector<std::vector<std::pair<int, int>>> neighbors;
};

Adjacency build_adjacency(const Graph& g);

struct SplitAssignment {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

// Validates edges/labels/features and canonicalizes the edge list. Counts of
// dropped self-loops and merged duplicates are logged at info level.
Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges, Tensor features,
                 std::vector<int> labels);

// Reads nodes.tsv and edges.tsv from `dir` (see the file format in the
// README). Throws validation_error with the offending line number on parse
// failures.
Graph load_dataset(const std::string& dir);

// Writes nodes.tsv / edges.tsv in canonical form; load_dataset(save_dataset)
// round-trips.
void save_dataset(const Graph& g, const std::string& dir);

int degree(const Graph& g, int node);
std::vector<int> degrees(const Graph& g);

// [x_i || deg(i)] per row, then each column standardized to mean 0/var 1;
// constant columns become all zeros.
Tensor augment_features(const Graph& g);

// Fraction of edges joining same-label endpoints. Requires >= 1 edge.
double edge_homophily(const Graph& g);

struct SplitFractions {
  double train = 0.48;
  double val = 0.32;
  double test = 0.20;
};

// Per-class stratified split with a seeded shuffle. Every class needs at
// least 3 nodes; each class contributes round(frac * class_size) train/val
// nodes and the remainder to test.
SplitAssignment make_splits(const Graph& g, const SplitFractions& fractions, std::uint64_t seed);

void save_splits(const SplitAssignment& s, const std::string& path);
SplitAssignment load_splits(const std::string& path);

struct DatasetStats {
  int nodes = 0;
  int edges = 0;
  double avg_degree = 0.0;
  int feature_dim = 0;
  int classes = 0;
  double homophily = 0.0;
};

DatasetStats dataset_stats(const Graph& g);

}  // namespace glance
