// Acceptance gate for the full artifact. Each criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails. Stated
// runtime bounds are enforced as part of the criterion itself.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "glance/cluster.hpp"
#include "glance/graph.hpp"
#include "glance/logic.hpp"
#include "glance/model.hpp"
#include "glance/refine.hpp"
#include "glance/rng.hpp"
#include "glance/tensor.hpp"
#include "test_util.hpp"

using namespace glance;

namespace {

// Every training run executed by this binary lands here so the loss
// composition identity can be audited across all of them at the end.
std::vector<std::pair<TrainConfig, RunMetrics>> g_runs;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream out;
  out.precision(prec);
  out << v;
  return out.str();
}

Tensor random_tensor(int rows, int cols, Rng& rng, double lo = -1.5, double hi = 1.5) {
  Tensor t(rows, cols);
  for (auto& v : t.values) v = rng.uniform(lo, hi);
  return t;
}

TensorRef as_const(const Tensor& t) { return std::make_shared<Tensor>(t); }

void set_block(ModelParams& params, const std::string& name, const TensorRef& value) {
  if (name == "attention_w") params.attention.weight_vectors = value;
  else if (name == "w_self") params.w_self = value;
  else if (name == "w_nbr") params.w_nbr = value;
  else if (name == "b_hidden") params.b_hidden = value;
  else if (name == "gate_logits") params.logic.gate_logits = value;
  else if (name == "w_out") params.w_out = value;
  else if (name == "b_out") params.b_out = value;
  else throw std::runtime_error("unknown block " + name);
}

// --- criterion 1: gradient fidelity ----------------------------------------

Outcome criterion1() {
  constexpr double kOpTol = 1e-4;
  constexpr double kEndTol = 1e-3;
  double worst_op = 0.0;
  double worst_end = 0.0;
  std::string worst_name = "none";
  bool ok = true;

  const auto check_op = [&](const char* name, const ScalarFn& f, const Tensor& x) {
    const GradCheckReport report = grad_check(f, x, 1e-5, kOpTol);
    if (report.max_rel_err > worst_op) {
      worst_op = report.max_rel_err;
      worst_name = name;
    }
    ok = ok && report.ok;
  };

  Rng rng(2026);
  for (int trial = 0; trial < 3; ++trial) {
    const Tensor x0 = random_tensor(3, 4, rng);
    const Tensor other = random_tensor(3, 4, rng);
    const Tensor right = random_tensor(4, 2, rng);

    check_op("matmul", [&](Tape& t, const TensorRef& x) { return sum(t, matmul(t, x, as_const(right))); }, x0);
    check_op("transpose", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, transpose(t, x))); }, x0);
    check_op("concat_cols", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, concat_cols(t, x, as_const(other)))); }, x0);
    check_op("add", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, add(t, x, as_const(other)))); }, x0);
    check_op("sub", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, sub(t, x, as_const(other)))); }, x0);
    check_op("mul_elementwise", [&](Tape& t, const TensorRef& x) { return sum(t, mul_elementwise(t, x, as_const(other))); }, x0);
    check_op("scale", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, scale(t, x, -2.5))); }, x0);
    check_op("sigmoid", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, x)); }, x0);
    check_op("relu", [&](Tape& t, const TensorRef& x) { return sum(t, relu(t, x)); }, x0);
    check_op("softmax_rows", [&](Tape& t, const TensorRef& x) { return sum(t, mul_elementwise(t, softmax_rows(t, x), as_const(other))); }, x0);
    check_op("sum", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, x)); }, x0);
    check_op("mean", [&](Tape& t, const TensorRef& x) { return mean(t, sigmoid(t, x)); }, x0);
    check_op("row_select", [&](Tape& t, const TensorRef& x) { return sum(t, sigmoid(t, row_select(t, x, {2, 0, 2}))); }, x0);
    check_op("cross_entropy", [&](Tape& t, const TensorRef& x) {
      return cross_entropy(t, matmul(t, x, as_const(right)), std::vector<int>{1, 0, 1});
    }, x0);
  }

  // Graph-structured ops on a small fixed topology.
  const std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {1, 2}};
  const int n = 4, f = 3;
  const Tensor feats = random_tensor(n, f, rng);
  const Tensor readout = random_tensor(n, f, rng, 0.2, 1.0);
  AttentionParams att;
  att.heads = 2;
  att.weight_vectors = as_const(random_tensor(2, 2 * f, rng));

  check_op("score_edges/features", [&](Tape& t, const TensorRef& x) {
    return sum(t, score_edges(t, x, edges, att));
  }, feats);
  check_op("score_edges/weights", [&](Tape& t, const TensorRef& x) {
    AttentionParams probe;
    probe.heads = 2;
    probe.weight_vectors = x;
    return sum(t, score_edges(t, as_const(feats), edges, probe));
  }, *att.weight_vectors);

  const Tensor alpha0 = random_tensor(static_cast<int>(edges.size()), 1, rng, 0.1, 0.9);
  check_op("attention_aggregate/alpha", [&](Tape& t, const TensorRef& x) {
    return sum(t, mul_elementwise(t, attention_aggregate(t, x, as_const(feats), edges, n), as_const(readout)));
  }, alpha0);
  check_op("attention_aggregate/x", [&](Tape& t, const TensorRef& x) {
    return sum(t, mul_elementwise(t, attention_aggregate(t, as_const(alpha0), x, edges, n), as_const(readout)));
  }, feats);
  check_op("mean_neighbor_agg", [&](Tape& t, const TensorRef& x) {
    return sum(t, mul_elementwise(t, mean_neighbor_agg(t, x, edges, n), as_const(readout)));
  }, feats);

  // Logic layer: output w.r.t. inputs and gate logits, entropy, logic loss.
  const LogicLayerParams layer = make_logic_layer(6, 5, 9);
  {
    Rng noise(31);
    for (auto& v : layer.gate_logits->values) v = noise.uniform(-1.0, 1.0);
  }
  const Tensor h0 = random_tensor(3, 5, rng);
  const Tensor logic_readout = random_tensor(3, 6, rng, 0.2, 1.0);
  check_op("logic_forward/h", [&](Tape& t, const TensorRef& x) {
    return sum(t, mul_elementwise(t, logic_forward(t, x, layer), as_const(logic_readout)));
  }, h0);
  check_op("logic_forward/logits", [&](Tape& t, const TensorRef& x) {
    LogicLayerParams probe = layer;
    probe.gate_logits = x;
    return sum(t, mul_elementwise(t, logic_forward(t, as_const(h0), probe), as_const(logic_readout)));
  }, *layer.gate_logits);
  check_op("entropy_rows", [&](Tape& t, const TensorRef& x) {
    return sum(t, entropy_rows(t, softmax_rows(t, x)));
  }, random_tensor(4, 6, rng));
  check_op("logic_loss", [&](Tape& t, const TensorRef& x) {
    LogicLayerParams probe = layer;
    probe.gate_logits = x;
    return logic_loss(t, probe);
  }, *layer.gate_logits);

  // End to end on the 6-node fixture, discrete structure held fixed.
  const Graph g = load_dataset("tests/data/fixture6");
  TrainConfig cfg;
  cfg.heads = 2;
  cfg.hidden = 8;
  cfg.logic_neurons = 4;
  cfg.seed = 3;
  cfg.lambda_logic = 0.1;
  cfg.logic_warmup_epochs = 0;
  cfg.lambda_struct = 0.5;
  const std::vector<int> mask = {0, 1, 3, 4};
  const ModelParams params = init_model(augment_features(g).cols, g.num_classes, cfg);
  FixedStructure fixed;
  {
    Tape tape;
    EpochState state;
    ForwardAux aux;
    forward(tape, g, params, cfg, state, aux);
    fixed.refined = aux.refined;
    fixed.clustering = aux.clustering;
  }
  for (const auto& [name, tref] : params.blocks()) {
    const auto loss_fn = [&, block = name](Tape& tape, const TensorRef& x) {
      ModelParams probe = clone_params(params);
      set_block(probe, block, x);
      EpochState state;
      ForwardAux aux;
      const TensorRef logits = forward(tape, g, probe, cfg, state, aux, &fixed);
      return total_loss(tape, logits, g.labels, mask, aux, probe, cfg, 7).total;
    };
    const GradCheckReport report = grad_check(loss_fn, *tref, 1e-5, kEndTol);
    worst_end = std::max(worst_end, report.max_rel_err);
    ok = ok && report.ok;
  }

  Outcome out;
  out.pass = ok;
  out.detail = "worst op rel err " + fmt(worst_op, 2) + " (" + worst_name +
               ", tol 1e-4), end-to-end " + fmt(worst_end, 2) + " (tol 1e-3)";
  return out;
}

// --- criterion 2: dataset fidelity -----------------------------------------

Outcome criterion2() {
  struct Expect {
    const char* dir;
    int nodes;
    double homophily;
  };
  const std::vector<Expect> expects = {
      {"data/cornell", 183, 0.13}, {"data/texas", 183, 0.11}, {"data/wisconsin", 251, 0.20}};
  bool ok = true;
  std::string detail;
  for (const auto& e : expects) {
    const DatasetStats s = dataset_stats(load_dataset(e.dir));
    const bool this_ok = s.nodes == e.nodes && s.feature_dim == 1703 && s.classes == 5 &&
                         std::abs(s.homophily - e.homophily) <= 0.03;
    ok = ok && this_ok;
    if (!detail.empty()) detail += ", ";
    detail += std::string(e.dir) + " n=" + std::to_string(s.nodes) + " h=" + fmt(s.homophily, 3);
  }
  return {ok, detail};
}

// --- criterion 3: clustering oracle ----------------------------------------

double inertia_of(const Tensor& x, const std::vector<int>& assign, int k) {
  Tensor centroids(k, x.cols);
  std::vector<int> counts(k, 0);
  for (int i = 0; i < x.rows; ++i) {
    ++counts[assign[i]];
    for (int c = 0; c < x.cols; ++c) centroids.at(assign[i], c) += x.at(i, c);
  }
  for (int g = 0; g < k; ++g) {
    if (counts[g] == 0) continue;
    for (int c = 0; c < x.cols; ++c) centroids.at(g, c) /= counts[g];
  }
  double total = 0.0;
  for (int i = 0; i < x.rows; ++i) {
    for (int c = 0; c < x.cols; ++c) {
      const double d = x.at(i, c) - centroids.at(assign[i], c);
      total += d * d;
    }
  }
  return total;
}

double brute_force_optimum(const Tensor& x, int k) {
  std::vector<int> assign(x.rows, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, inertia_of(x, assign, k));
    int pos = x.rows - 1;
    while (pos >= 0 && assign[pos] == k - 1) assign[pos--] = 0;
    if (pos < 0) break;
    ++assign[pos];
  }
  return best;
}

Outcome criterion3() {
  struct Instance {
    Tensor points;
    int k;
  };
  std::vector<Instance> instances;
  instances.push_back({Tensor(*tensor({{0.0, 0.0}, {0.0, 1.0}, {10.0, 0.0}, {10.0, 1.0}})), 2});
  instances.push_back({Tensor(*tensor({{-8.0, 0.0},
                                       {-8.2, 0.1},
                                       {-7.9, -0.1},
                                       {0.1, 6.0},
                                       {-0.1, 6.2},
                                       {8.0, -5.0},
                                       {8.3, -5.2},
                                       {7.8, -4.9}})),
                       3});
  instances.push_back({Tensor(*tensor({{0.0}, {0.5}, {1.0}, {9.0}, {9.5}, {10.0}})), 2});
  instances.push_back({Tensor(*tensor({{0.0}, {1.0}, {2.0}, {10.0}, {11.0}, {20.0}, {21.0}})), 3});
  instances.push_back({Tensor(*tensor({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {6.0, 6.0}, {6.1, 6.1}})), 2});

  bool ok = true;
  double worst_ratio = 1.0;
  int monotone_total = 0;
  for (const auto& inst : instances) {
    const double opt = brute_force_optimum(inst.points, inst.k);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Clustering c = kmeans(inst.points, inst.k, seed);
      if (opt > 0.0) worst_ratio = std::max(worst_ratio, c.inertia / opt);
      ok = ok && c.inertia <= 1.05 * opt + 1e-9;
      for (std::size_t i = 1; i < c.inertia_trace.size(); ++i) {
        ok = ok && c.inertia_trace[i] <= c.inertia_trace[i - 1] + 1e-9;
        ++monotone_total;
      }
    }
  }
  return {ok, "5 instances x 20 seeds, worst inertia ratio " + fmt(worst_ratio, 6) +
                  " (bound 1.05), " + std::to_string(monotone_total) +
                  " trace steps non-increasing"};
}

// --- criterion 4: pruning properties ---------------------------------------

Outcome criterion4() {
  Rng rng(63);
  bool ok = true;
  int graphs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(20));
    Graph g = testutil::make_random_graph(rng, n, 2 * n, 2, 2);
    if (g.num_edges() == 0) continue;
    ++graphs;
    const int m = g.num_edges();
    std::vector<double> scores(m);
    for (auto& s : scores) s = rng.next_double();
    const double p = 0.95 * rng.next_double();

    const RefinedGraph r = prune(g, scores, p);
    const std::set<std::pair<int, int>> original(g.edges.begin(), g.edges.end());
    for (const auto& e : r.kept_edges) ok = ok && original.count(e) == 1;

    std::vector<int> before(g.num_nodes, 0), after(g.num_nodes, 0);
    for (const auto& [a, b] : g.edges) {
      ++before[a];
      ++before[b];
    }
    for (const auto& [a, b] : r.kept_edges) {
      ++after[a];
      ++after[b];
    }
    for (int i = 0; i < g.num_nodes; ++i) {
      if (before[i] > 0) ok = ok && after[i] >= 1;
    }

    const double p2 = p + (0.95 - p) * rng.next_double();
    const RefinedGraph r2 = prune(g, scores, p2);
    const std::set<int> kept1(r.kept_idx.begin(), r.kept_idx.end());
    for (int e : r2.kept_idx) ok = ok && kept1.count(e) == 1;

    const RefinedGraph bare = prune(g, scores, p, /*protect=*/false);
    const double removed =
        static_cast<double>(m - static_cast<int>(bare.kept_edges.size())) / m;
    ok = ok && removed >= p - 1.0 / m - 1e-12 && removed <= p + 1.0 / m + 1e-12;
  }
  return {ok && graphs >= 190,
          std::to_string(graphs) + " random graphs: subset, protection, nesting, "
          "removal fraction within 1/m"};
}

// --- criterion 5: logic-layer exactness ------------------------------------

Outcome criterion5() {
  // Truth tables in gate order, corner order (0,0), (0,1), (1,0), (1,1).
  static const int kTruth[kGateCount][4] = {
      {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 0, 1, 1},
      {0, 1, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 1, 1, 1},
      {1, 0, 0, 0}, {1, 0, 0, 1}, {1, 0, 1, 0}, {1, 0, 1, 1},
      {1, 1, 0, 0}, {1, 1, 0, 1}, {1, 1, 1, 0}, {1, 1, 1, 1}};
  static const double kCorners[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

  int corner_hits = 0;
  bool ok = true;
  for (int g = 0; g < kGateCount; ++g) {
    for (int c = 0; c < 4; ++c) {
      if (gate_value(g, kCorners[c][0], kCorners[c][1]) == double(kTruth[g][c])) {
        ++corner_hits;
      } else {
        ok = false;
      }
    }
  }

  // Near-discrete layers must agree with their hardened circuits.
  int layers_checked = 0;
  Rng rng(67);
  for (std::uint64_t wiring_seed = 12; wiring_seed < 17; ++wiring_seed) {
    const int width = 4;
    const LogicLayerParams params = make_logic_layer(8, width, wiring_seed);
    for (int t = 0; t < params.num_neurons; ++t) {
      const int winner = static_cast<int>(rng.next_below(kGateCount));
      for (int g = 0; g < kGateCount; ++g) {
        params.gate_logits->at(t, g) = (g == winner) ? 15.0 : rng.next_double();
      }
    }
    double entropy = 0.0;
    {
      Tape tape;
      entropy = logic_loss(tape, params)->at(0, 0);
    }
    ok = ok && entropy <= 0.01;  // construction guarantees the precondition
    const std::vector<HardNeuron> neurons = harden(params);
    for (int bits = 0; bits < (1 << width); ++bits) {
      std::vector<double> row(width);
      for (int c = 0; c < width; ++c) row[c] = (bits >> c) & 1;
      const std::vector<double> hard = hard_eval(neurons, row);
      Tape tape;
      const TensorRef soft = gate_mix(tape, tensor(1, width, row), params);
      for (int t = 0; t < soft->cols; ++t) {
        const double rounded = soft->at(0, t) >= 0.5 ? 1.0 : 0.0;
        ok = ok && rounded == hard[t];
      }
    }
    ++layers_checked;
  }
  return {ok, std::to_string(corner_hits) + "/64 corners exact, " +
                  std::to_string(layers_checked) +
                  " near-discrete layers match hardened circuits on all inputs"};
}

// --- criterion 6: overfit sanity -------------------------------------------

Outcome criterion6() {
  const Graph g = load_dataset("tests/data/fixture6");
  SplitAssignment splits;
  splits.train = {0, 1, 2, 3, 4, 5};
  splits.val = {0, 3};
  splits.test = {1, 4};
  int reached = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.lr = 0.02;
    cfg.heads = 2;
    cfg.hidden = 16;
    cfg.logic_neurons = 8;
    cfg.seed = seed;
    const TrainResult result = train(g, splits, cfg);
    g_runs.emplace_back(cfg, result.metrics);
    double best_train = 0.0;
    for (const auto& rec : result.metrics.epochs) best_train = std::max(best_train, rec.train_acc);
    if (best_train == 1.0) ++reached;
  }
  return {reached == 5, std::to_string(reached) + "/5 seeds reached train accuracy 1.0 within 50 epochs"};
}

// --- criteria 7 and 8: benchmark band and determinism ----------------------

struct SweepOutput {
  std::vector<double> glance_acc;
  std::vector<double> gcn_acc;
  std::vector<std::string> metric_bytes;  // glance then gcn, per seed
  double glance_mean = 0.0;
  double gcn_mean = 0.0;
};

SweepOutput run_benchmark_sweep(const Graph& g) {
  SweepOutput out;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg;
    cfg.seed = seed;
    const SplitAssignment splits =
        make_splits(g, cfg.split, derived_seed(cfg.seed, rng_stream::splits));
    const TrainResult glance_result = train(g, splits, cfg);
    g_runs.emplace_back(cfg, glance_result.metrics);
    out.glance_acc.push_back(glance_result.metrics.test_acc);
    out.metric_bytes.push_back(metrics_to_jsonl(glance_result.metrics, false));

    const GcnResult gcn_result = gcn_baseline_train(g, splits, cfg);
    g_runs.emplace_back(cfg, gcn_result.metrics);
    out.gcn_acc.push_back(gcn_result.metrics.test_acc);
    out.metric_bytes.push_back(metrics_to_jsonl(gcn_result.metrics, false));
  }
  for (double a : out.glance_acc) out.glance_mean += a;
  out.glance_mean /= static_cast<double>(out.glance_acc.size());
  for (double a : out.gcn_acc) out.gcn_mean += a;
  out.gcn_mean /= static_cast<double>(out.gcn_acc.size());
  return out;
}

Outcome criterion7(const SweepOutput& sweep, double elapsed) {
  const bool band_ok = sweep.glance_mean >= 0.70 && sweep.glance_mean > sweep.gcn_mean &&
                       sweep.gcn_mean >= 0.45 && sweep.gcn_mean <= 0.75;
  const bool time_ok = elapsed < 600.0;
  return {band_ok && time_ok,
          "wisconsin 5-seed means: glance " + fmt(sweep.glance_mean) + " (need >= 0.70), gcn " +
              fmt(sweep.gcn_mean) + " (need [0.45, 0.75] and < glance)"};
}

Outcome criterion8(const Graph& g, const SweepOutput& first) {
  const SweepOutput second = run_benchmark_sweep(g);
  bool identical = first.metric_bytes.size() == second.metric_bytes.size();
  int mismatches = 0;
  if (identical) {
    for (std::size_t i = 0; i < first.metric_bytes.size(); ++i) {
      if (first.metric_bytes[i] != second.metric_bytes[i]) {
        ++mismatches;
        identical = false;
      }
    }
  }
  return {identical,
          identical
              ? std::to_string(first.metric_bytes.size()) + "/" +
                    std::to_string(first.metric_bytes.size()) +
                    " rerun metrics files byte-identical"
              : std::to_string(mismatches) + " metrics files differ between reruns"};
}

// --- criterion 9: loss composition identity --------------------------------

Outcome criterion9() {
  std::size_t epochs_checked = 0;
  double worst_gap = 0.0;
  bool ok = !g_runs.empty();
  for (const auto& [cfg, metrics] : g_runs) {
    for (const auto& rec : metrics.epochs) {
      const double expected =
          rec.ce + rec.lambda_logic_eff * rec.logic + cfg.lambda_struct * rec.prune;
      const double gap = std::abs(rec.total - expected);
      worst_gap = std::max(worst_gap, gap);
      ok = ok && gap <= 1e-9;
      ++epochs_checked;
    }
  }
  return {ok, std::to_string(epochs_checked) + " epoch records across " +
                  std::to_string(g_runs.size()) + " runs, worst |total - sum| = " +
                  fmt(worst_gap, 3) + " (tol 1e-9)"};
}

struct Criterion {
  int id;
  const char* name;
  double bound_seconds;  // 0 = no stated bound
  std::function<Outcome()> run;
};

}  // namespace

int main() try {
  const Graph wisconsin = load_dataset("data/wisconsin");
  SweepOutput sweep;
  double sweep_seconds = 0.0;

  const std::vector<Criterion> criteria = {
      {1, "gradient fidelity", 10.0, criterion1},
      {2, "dataset fidelity", 5.0, criterion2},
      {3, "clustering oracle", 30.0, criterion3},
      {4, "pruning properties", 30.0, criterion4},
      {5, "logic-layer exactness", 0.0, criterion5},
      {6, "overfit sanity", 5.0, criterion6},
      {7, "heterophily benchmark band", 600.0,
       [&] {
         const auto start = std::chrono::steady_clock::now();
         sweep = run_benchmark_sweep(wisconsin);
         sweep_seconds = seconds_since(start);
         return criterion7(sweep, sweep_seconds);
       }},
      {8, "determinism of the benchmark", 0.0, [&] { return criterion8(wisconsin, sweep); }},
      {9, "loss composition identity", 0.0, criterion9},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = criterion.id == 7 ? sweep_seconds : seconds_since(start);
    bool in_time = criterion.bound_seconds == 0.0 || elapsed < criterion.bound_seconds;
    if (!in_time) outcome.pass = false;
    if (!outcome.pass) ++failures;
    std::printf("criterion %d: %s — %s — %s (%.1fs%s)\n", criterion.id,
                outcome.pass ? "PASS" : "FAIL", criterion.name, outcome.detail.c_str(), elapsed,
                criterion.bound_seconds > 0.0
                    ? (", bound " + fmt(criterion.bound_seconds, 3) + "s").c_str()
                    : "");
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
} catch (const std::exception& e) {
  std::printf("acceptance aborted: %s\n", e.what());
  return 1;
}
