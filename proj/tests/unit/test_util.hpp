#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "glance/graph.hpp"
#include "glance/rng.hpp"
#include "glance/tensor.hpp"

namespace glance::testutil {

// Random connected-ish graph with every class represented.
inline Graph make_random_graph(Rng& rng, int n, int target_edges, int classes, int feat_dim) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i < classes ? i : static_cast<int>(rng.next_below(classes));
  Tensor features(n, feat_dim);
  for (auto& v : features.values) v = rng.uniform(-1.0, 1.0);

  std::set<std::pair<int, int>> edge_set;
  int attempts = 0;
  while (static_cast<int>(edge_set.size()) < target_edges && attempts < 50 * target_edges) {
    ++attempts;
    int a = static_cast<int>(rng.next_below(n));
    int b = static_cast<int>(rng.next_below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    edge_set.insert({a, b});
  }
  std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
  return make_graph(n, std::move(edges), std::move(features), std::move(labels));
}

// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("glance_" + tag + "_" + std::to_string(++counter) + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::filesystem::path path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace glance::testutil
