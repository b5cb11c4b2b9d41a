#include "glance/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "glance/error.hpp"
#include "glance/log.hpp"
#include "glance/rng.hpp"

namespace glance {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& why) {
  throw validation_error(path + ":" + std::to_string(line_no) + ": " + why);
}

long parse_int(const std::string& path, int line_no, std::string_view text) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    parse_fail(path, line_no, "expected integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(const std::string& path, int line_no, std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    parse_fail(path, line_no, "expected real number, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Tolerate a trailing newline: getline already drops the final empty piece.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Adjacency build_adjacency(const Graph& g) {
  Adjacency adj;
  adj.neighbors.resize(g.num_nodes);
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edges[e];
    adj.neighbors[i].push_back({j, e});
    adj.neighbors[j].push_back({i, e});
  }
  return adj;
}

Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges, Tensor features,
                 std::vector<int> labels) {
  if (num_nodes < 1) throw validation_error("graph needs at least one node");
  if (features.rows != num_nodes) {
    throw validation_error("feature matrix " + features.shape_str() + " does not match " +
                           std::to_string(num_nodes) + " nodes");
  }
  if (static_cast<int>(labels.size()) != num_nodes) {
    throw validation_error("label count " + std::to_string(labels.size()) +
                           " does not match " + std::to_string(num_nodes) + " nodes");
  }

  int self_loops = 0;
  std::set<std::pair<int, int>> canonical;
  int duplicates = 0;
  for (auto [a, b] : edges) {
    if (a < 0 || a >= num_nodes || b < 0 || b >= num_nodes) {
      throw validation_error("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                             ") has an endpoint outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (a == b) {
      ++self_loops;
      continue;
    }
    if (a > b) std::swap(a, b);
    if (!canonical.insert({a, b}).second) ++duplicates;
  }
  if (self_loops > 0) log::info("dropped " + std::to_string(self_loops) + " self-loop(s)");
  if (duplicates > 0)
    log::info("merged " + std::to_string(duplicates) + " duplicate/reversed edge(s)");

  Graph g;
  g.num_nodes = num_nodes;
  g.edges.assign(canonical.begin(), canonical.end());
  g.features = std::move(features);
  g.labels = std::move(labels);

  int max_label = -1;
  for (int y : g.labels) {
    if (y < 0) throw validation_error("negative label " + std::to_string(y));
    max_label = std::max(max_label, y);
  }
  g.num_classes = max_label + 1;
  std::vector<int> counts(g.num_classes, 0);
  for (int y : g.labels) ++counts[y];
  for (int c = 0; c < g.num_classes; ++c) {
    if (counts[c] == 0) {
      throw validation_error("class " + std::to_string(c) + " has no nodes");
    }
  }
  return g;
}

Graph load_dataset(const std::string& dir) {
  const std::string nodes_path = dir + "/nodes.tsv";
  const std::string edges_path = dir + "/edges.tsv";

  const auto node_lines = read_lines(nodes_path);
  if (node_lines.empty()) throw validation_error(nodes_path + " is empty");

  const int n = static_cast<int>(node_lines.size());
  std::vector<int> labels(n);
  int d = -1;
  Tensor features;
  for (int i = 0; i < n; ++i) {
    const int line_no = i + 1;
    const auto fields = split(node_lines[i], '\t');
    if (fields.size() != 3) {
      parse_fail(nodes_path, line_no,
                 "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const long id = parse_int(nodes_path, line_no, fields[0]);
    if (id != i) {
      parse_fail(nodes_path, line_no,
                 "node ids must be dense from 0 in order; expected " + std::to_string(i) +
                     ", got " + std::to_string(id));
    }
    const long label = parse_int(nodes_path, line_no, fields[1]);
    if (label < 0) parse_fail(nodes_path, line_no, "negative label");
    labels[i] = static_cast<int>(label);

    const auto feats = split(fields[2], ',');
    if (d < 0) {
      d = static_cast<int>(feats.size());
      if (d < 1) parse_fail(nodes_path, line_no, "empty feature vector");
      features = Tensor(n, d);
    } else if (static_cast<int>(feats.size()) != d) {
      parse_fail(nodes_path, line_no,
                 "expected " + std::to_string(d) + " features, got " +
                     std::to_string(feats.size()));
    }
    for (int j = 0; j < d; ++j) {
      features.at(i, j) = parse_real(nodes_path, line_no, feats[j]);
    }
  }

  std::vector<std::pair<int, int>> edges;
  const auto edge_lines = read_lines(edges_path);
  for (std::size_t k = 0; k < edge_lines.size(); ++k) {
    const int line_no = static_cast<int>(k) + 1;
    const auto fields = split(edge_lines[k], '\t');
    if (fields.size() != 2) {
      parse_fail(edges_path, line_no,
                 "expected 2 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const long src = parse_int(edges_path, line_no, fields[0]);
    const long dst = parse_int(edges_path, line_no, fields[1]);
    edges.push_back({static_cast<int>(src), static_cast<int>(dst)});
  }

  return make_graph(n, std::move(edges), std::move(features), std::move(labels));
}

void save_dataset(const Graph& g, const std::string& dir) {
  {
    std::ofstream out(dir + "/nodes.tsv", std::ios::binary);
    if (!out) throw validation_error("cannot write " + dir + "/nodes.tsv");
    for (int i = 0; i < g.num_nodes; ++i) {
      out << i << '\t' << g.labels[i] << '\t';
      for (int j = 0; j < g.feature_dim(); ++j) {
        if (j > 0) out << ',';
        out << format_real(g.features.at(i, j));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir + "/edges.tsv", std::ios::binary);
    if (!out) throw validation_error("cannot write " + dir + "/edges.tsv");
    for (const auto& [a, b] : g.edges) out << a << '\t' << b << '\n';
  }
}

int degree(const Graph& g, int node) {
  if (node < 0 || node >= g.num_nodes) {
    throw validation_error("node index " + std::to_string(node) + " out of range [0, " +
                           std::to_string(g.num_nodes) + ")");
  }
  int deg = 0;
  for (const auto& [a, b] : g.edges) {
    if (a == node || b == node) ++deg;
  }
  return deg;
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> deg(g.num_nodes, 0);
  for (const auto& [a, b] : g.edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

Tensor augment_features(const Graph& g) {
  const int n = g.num_nodes;
  const int d = g.feature_dim();
  Tensor out(n, d + 1);
  const auto deg = degrees(g);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out.at(i, j) = g.features.at(i, j);
    out.at(i, d) = static_cast<double>(deg[i]);
  }
  // Column-wise standardization; constant columns map to zero.
  for (int j = 0; j <= d; ++j) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += out.at(i, j);
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = out.at(i, j) - mean;
      var += c * c;
    }
    var /= n;
    if (var < 1e-24) {
      for (int i = 0; i < n; ++i) out.at(i, j) = 0.0;
    } else {
      const double inv_std = 1.0 / std::sqrt(var);
      for (int i = 0; i < n; ++i) out.at(i, j) = (out.at(i, j) - mean) * inv_std;
    }
  }
  return out;
}

double edge_homophily(const Graph& g) {
  if (g.edges.empty()) throw validation_error("edge homophily is undefined on a graph with no edges");
  int same = 0;
  for (const auto& [a, b] : g.edges) {
    if (g.labels[a] == g.labels[b]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

SplitAssignment make_splits(const Graph& g, const SplitFractions& fr, std::uint64_t seed) {
  if (fr.train <= 0.0 || fr.val <= 0.0 || fr.test <= 0.0) {
    throw validation_error("split fractions must be positive");
  }
  if (std::abs(fr.train + fr.val + fr.test - 1.0) > 1e-9) {
    throw validation_error("split fractions must sum to 1");
  }

  std::vector<std::vector<int>> members(g.num_classes);
  for (int i = 0; i < g.num_nodes; ++i) members[g.labels[i]].push_back(i);

  SplitAssignment s;
  s.seed = seed;
  Rng rng(seed);
  for (int c = 0; c < g.num_classes; ++c) {
    auto& nodes = members[c];
    const int nc = static_cast<int>(nodes.size());
    if (nc < 3) {
      throw validation_error("class " + std::to_string(c) + " has only " + std::to_string(nc) +
                             " node(s); at least 3 are needed to stratify");
    }
    rng.shuffle(nodes);
    int n_train = std::max(1L, std::lround(fr.train * nc));
    int n_val = static_cast<int>(std::lround(fr.val * nc));
    n_val = std::min(n_val, nc - n_train - 1);
    n_val = std::max(n_val, 1);
    for (int t = 0; t < nc; ++t) {
      if (t < n_train) {
        s.train.push_back(nodes[t]);
      } else if (t < n_train + n_val) {
        s.val.push_back(nodes[t]);
      } else {
        s.test.push_back(nodes[t]);
      }
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

void save_splits(const SplitAssignment& s, const std::string& path) {
  nlohmann::json j;
  j["train"] = s.train;
  j["val"] = s.val;
  j["test"] = s.test;
  j["seed"] = s.seed;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

SplitAssignment load_splits(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(path + ": " + e.what());
  }
  SplitAssignment s;
  try {
    s.train = j.at("train").get<std::vector<int>>();
    s.val = j.at("val").get<std::vector<int>>();
    s.test = j.at("test").get<std::vector<int>>();
    s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(path + ": " + e.what());
  }
  return s;
}

DatasetStats dataset_stats(const Graph& g) {
  DatasetStats st;
  st.nodes = g.num_nodes;
  st.edges = g.num_edges();
  st.avg_degree = 2.0 * g.num_edges() / static_cast<double>(g.num_nodes);
  st.feature_dim = g.feature_dim();
  st.classes = g.num_classes;
  st.homophily = g.edges.empty() ? 0.0 : edge_homophily(g);
  return st;
}

}  // namespace glance
