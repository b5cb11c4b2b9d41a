#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glance/cluster.hpp"
#include "glance/graph.hpp"
#include "glance/logic.hpp"
#include "glance/refine.hpp"
#include "glance/tensor.hpp"

namespace glance {

enum class ClusterOn { augmented, hidden };

// Hyperparameters and protocol settings for one training run. Counts and
// rates are validated up front; k == 0 means "use the number of classes".
struct TrainConfig {
  int epochs = 300;
  double lr = 0.005;
  double lambda_logic = 0.1;
  double lambda_struct = 0.0;
  double prune_quantile = 0.3;
  int heads = 4;
  int hidden = 64;
  int logic_neurons = 32;
  int k = 0;
  std::uint64_t seed = 0;
  SplitFractions split;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int logic_warmup_epochs = 50;
  ClusterOn cluster_on = ClusterOn::augmented;

  void validate() const;  // throws validation_error
  int resolve_k(int num_classes) const { return k == 0 ? num_classes : k; }
  // Logic-loss weight after linear warmup, using 0-based epochs.
  double lambda_logic_at(int epoch) const;
};

// Strict JSON (de)serialization: unknown keys are rejected so typos in
// config files fail loudly. config_hash fingerprints the canonical form.
TrainConfig config_from_json(const std::string& text);
std::string config_to_json(const TrainConfig& cfg);
std::string config_hash(const TrainConfig& cfg);

// All learnable state. Attention scores the augmented features x'; the
// hidden layer mixes a self transform with the attention-normalized
// neighbor aggregate of x_tilde = [x' || cluster features]; the logic layer
// reads the hidden units and the linear head reads z = [hidden || logic].
struct ModelParams {
  AttentionParams attention;  // [heads x 2*f_aug]
  TensorRef w_self;           // [f_in x f_hid]
  TensorRef w_nbr;            // [f_in x f_hid]
  TensorRef b_hidden;         // [1 x f_hid]
  LogicLayerParams logic;     // wired over f_hid
  TensorRef w_out;            // [(f_hid + L) x C]
  TensorRef b_out;            // [1 x C]

  // Named parameter tensors in the fixed order that defines checkpoint
  // layout and optimizer-state alignment.
  std::vector<std::pair<std::string, TensorRef>> blocks() const;
};

// Seeded initialization: weights uniform in +-sqrt(6/(fan_in+fan_out)),
// biases and gate logits zero, wiring drawn from its own seed stream.
ModelParams init_model(int f_aug, int num_classes, const TrainConfig& cfg);

// Deep copy with fresh gradient buffers.
ModelParams clone_params(const ModelParams& params);

// Cross-epoch context owned by a training run: the augmented features are
// computed once, the augmented-feature clustering is reused across epochs
// (its input never changes), and the hidden-variant clustering reads the
// previous epoch's hidden values (zeros on the first epoch).
struct EpochState {
  Tensor x_aug;
  std::optional<Clustering> aug_clustering;
  Tensor prev_hidden;
};

// Detached per-epoch decisions, exposed for inspection and reusable to hold
// the discrete structure fixed (gradient checks, checkpoint evaluation).
struct ForwardAux {
  TensorRef alpha;       // scores for all edges, on tape
  TensorRef alpha_kept;  // scores for surviving edges, on tape
  RefinedGraph refined;
  Clustering clustering;
  TensorRef hidden;
  TensorRef logic_out;
};

struct FixedStructure {
  RefinedGraph refined;
  Clustering clustering;
};

// Full pipeline: augment -> score -> prune -> cluster -> concat ->
// hidden -> logic -> linear head. Returns [n x C] logits on the tape.
// When `fixed` is given, the pruning decision and clustering are taken from
// it instead of being recomputed (attention weights still flow gradients).
TensorRef forward(Tape& tape, const Graph& g, const ModelParams& params, const TrainConfig& cfg,
                  EpochState& state, ForwardAux& aux, const FixedStructure* fixed = nullptr);

// Normalized attention aggregation over surviving edges:
//   out_i = sum_{(i,j) kept} alpha_e / S_i * x_j,  S_i = sum of alpha over
// kept edges at i. Nodes with no kept edge get a zero row. Differentiable
// in both alpha and x.
TensorRef attention_aggregate(Tape& tape, const TensorRef& alpha_kept, const TensorRef& x,
                              const std::vector<std::pair<int, int>>& kept_edges, int num_nodes);

// Mean aggregation with self-inclusion over the full edge set:
//   out_i = (x_i + sum_{j in N(i)} x_j) / (1 + deg_i).
TensorRef mean_neighbor_agg(Tape& tape, const TensorRef& x,
                            const std::vector<std::pair<int, int>>& edges, int num_nodes);

// Hidden layer over a fixed refined structure, treating the kept-edge scores
// as constants: h = ReLU(x W_self + aggregate(x) W_nbr + b). The tracked
// score path lives inside forward.
TensorRef hidden_representation(Tape& tape, const TensorRef& x_tilde, const RefinedGraph& refined,
                                const ModelParams& params);

struct LossParts {
  TensorRef total;  // on tape
  double ce = 0.0;
  double logic = 0.0;
  double prune = 0.0;
  double lambda_logic_eff = 0.0;
};

// Cross entropy on the train rows plus the warmed-up logic term and the
// optional structural term (mean kept-edge score).
LossParts total_loss(Tape& tape, const TensorRef& logits, const std::vector<int>& labels,
                     const std::vector<int>& train_mask, const ForwardAux& aux,
                     const ModelParams& params, const TrainConfig& cfg, int epoch);

// --- optimizer -------------------------------------------------------------

struct AdamState {
  int t = 0;
  std::vector<std::vector<double>> m;  // first moments, aligned with blocks
  std::vector<std::vector<double>> v;  // second moments
};

AdamState init_adam(const std::vector<std::pair<std::string, TensorRef>>& blocks);

// One bias-corrected Adam update from the gradients currently stored on the
// blocks. Throws on non-finite gradients or parameters, naming the block.
void adam_step(const std::vector<std::pair<std::string, TensorRef>>& blocks, AdamState& state,
               const TrainConfig& cfg);

// --- metrics and training --------------------------------------------------

struct EpochRecord {
  int epoch = 0;
  double total = 0.0;
  double ce = 0.0;
  double logic = 0.0;
  double prune = 0.0;
  double lambda_logic_eff = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  int kept_edges = 0;
  double cluster_inertia = 0.0;
};

struct RunMetrics {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_acc = 0.0;
  double test_acc = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// One JSON object per epoch, then a summary object. Deterministic bytes;
// the optional timestamp goes into the summary object only.
std::string metrics_to_jsonl(const RunMetrics& metrics, bool with_timestamp);

// Argmax class per row; ties go to the lowest class index.
std::vector<int> predictions(const Tensor& logits);
double accuracy_from_logits(const Tensor& logits, const std::vector<int>& labels,
                            const std::vector<int>& split);

struct TrainResult {
  ModelParams params;  // snapshot from the best-validation epoch
  RunMetrics metrics;
};

// Full-batch training loop: per epoch score/prune/cluster, forward, composite
// loss, backward, Adam. Tracks best validation accuracy (ties -> earliest
// epoch) and reports test accuracy from that epoch's logits.
TrainResult train(const Graph& g, const SplitAssignment& splits, const TrainConfig& cfg);

// Rebuilds the deterministic pipeline for the given parameters and scores the
// split. With cluster_on == hidden this uses the first-epoch bootstrap state.
double evaluate(const Graph& g, const ModelParams& params, const TrainConfig& cfg,
                const std::vector<int>& split);

// --- GCN baseline ----------------------------------------------------------

struct GcnParams {
  TensorRef w1, b1, w2, b2;
  std::vector<std::pair<std::string, TensorRef>> blocks() const;
};

struct GcnResult {
  GcnParams params;
  RunMetrics metrics;
};

// Two-layer mean-aggregation graph convolution over the same augmented
// features, trained with the same optimizer and selection protocol.
GcnResult gcn_baseline_train(const Graph& g, const SplitAssignment& splits,
                             const TrainConfig& cfg);

GcnParams init_gcn(int f_aug, int num_classes, const TrainConfig& cfg);
TensorRef gcn_forward(Tape& tape, const Graph& g, const Tensor& x_aug, const GcnParams& params);
double gcn_evaluate(const Graph& g, const GcnParams& params, const std::vector<int>& split);

}  // namespace glance
