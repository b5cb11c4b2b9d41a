#include "glance/model.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <string>

#include "glance/error.hpp"
#include "glance/log.hpp"
#include "glance/rng.hpp"
#include "json.hpp"

namespace glance {

namespace {

void track_out(Tape& tape, const TensorRef& out, bool parents_tracked,
               std::function<void()> back) {
  if (!parents_tracked) return;
  out->requires_grad = true;
  out->ensure_grad();
  tape.record(out, std::move(back));
}

TensorRef as_ref(const Tensor& t) { return std::make_shared<Tensor>(t); }

// Broadcast a [1 x w] bias over n rows through a matmul with a constant ones
// column, so the existing matmul backward yields the column-sum bias grad.
TensorRef broadcast_rows(Tape& tape, const TensorRef& row, int n) {
  return matmul(tape, ones(n, 1), row);
}

}  // namespace

// --- config ----------------------------------------------------------------

void TrainConfig::validate() const {
  if (epochs < 1) throw validation_error("config: epochs must be at least 1");
  if (!(lr > 0.0)) throw validation_error("config: lr must be positive");
  if (lambda_logic < 0.0 || lambda_struct < 0.0) {
    throw validation_error("config: loss weights must be non-negative");
  }
  if (prune_quantile < 0.0 || prune_quantile > 0.95) {
    throw validation_error("config: prune_quantile must lie in [0, 0.95]");
  }
  if (heads < 1 || hidden < 1 || logic_neurons < 1) {
    throw validation_error("config: heads, hidden and logic_neurons must be at least 1");
  }
  if (k < 0) throw validation_error("config: k must be non-negative (0 means class count)");
  if (logic_warmup_epochs < 0) throw validation_error("config: logic_warmup_epochs must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw validation_error("config: adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw validation_error("config: adam_eps must be positive");
  if (!(split.train > 0.0 && split.val > 0.0 && split.test > 0.0)) {
    throw validation_error("config: split fractions must be positive");
  }
  if (std::abs(split.train + split.val + split.test - 1.0) > 1e-9) {
    throw validation_error("config: split fractions must sum to 1");
  }
}

double TrainConfig::lambda_logic_at(int epoch) const {
  if (logic_warmup_epochs <= 0) return lambda_logic;
  const double factor = std::min(1.0, static_cast<double>(epoch) / logic_warmup_epochs);
  return lambda_logic * factor;
}

TrainConfig config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw validation_error("config: top level must be a JSON object");

  TrainConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "epochs") cfg.epochs = value.get<int>();
      else if (key == "lr") cfg.lr = value.get<double>();
      else if (key == "lambda_logic") cfg.lambda_logic = value.get<double>();
      else if (key == "lambda_struct") cfg.lambda_struct = value.get<double>();
      else if (key == "prune_quantile") cfg.prune_quantile = value.get<double>();
      else if (key == "heads") cfg.heads = value.get<int>();
      else if (key == "hidden") cfg.hidden = value.get<int>();
      else if (key == "logic_neurons") cfg.logic_neurons = value.get<int>();
      else if (key == "k") cfg.k = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "logic_warmup_epochs") cfg.logic_warmup_epochs = value.get<int>();
      else if (key == "adam_beta1") cfg.adam_beta1 = value.get<double>();
      else if (key == "adam_beta2") cfg.adam_beta2 = value.get<double>();
      else if (key == "adam_eps") cfg.adam_eps = value.get<double>();
      else if (key == "split") {
        for (const auto& [skey, sval] : value.items()) {
          if (skey == "train") cfg.split.train = sval.get<double>();
          else if (skey == "val") cfg.split.val = sval.get<double>();
          else if (skey == "test") cfg.split.test = sval.get<double>();
          else throw validation_error("config: unknown split key '" + skey + "'");
        }
      } else if (key == "cluster_on") {
        const std::string mode = value.get<std::string>();
        if (mode == "augmented") cfg.cluster_on = ClusterOn::augmented;
        else if (mode == "hidden") cfg.cluster_on = ClusterOn::hidden;
        else throw validation_error("config: cluster_on must be 'augmented' or 'hidden'");
      } else {
        throw validation_error("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const TrainConfig& cfg) {
  nlohmann::json doc;
  doc["epochs"] = cfg.epochs;
  doc["lr"] = cfg.lr;
  doc["lambda_logic"] = cfg.lambda_logic;
  doc["lambda_struct"] = cfg.lambda_struct;
  doc["prune_quantile"] = cfg.prune_quantile;
  doc["heads"] = cfg.heads;
  doc["hidden"] = cfg.hidden;
  doc["logic_neurons"] = cfg.logic_neurons;
  doc["k"] = cfg.k;
  doc["seed"] = cfg.seed;
  doc["logic_warmup_epochs"] = cfg.logic_warmup_epochs;
  doc["adam_beta1"] = cfg.adam_beta1;
  doc["adam_beta2"] = cfg.adam_beta2;
  doc["adam_eps"] = cfg.adam_eps;
  doc["split"] = {{"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}};
  doc["cluster_on"] = cfg.cluster_on == ClusterOn::augmented ? "augmented" : "hidden";
  return doc.dump();
}

std::string config_hash(const TrainConfig& cfg) {
  // FNV-1a over the canonical JSON form.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- parameters ------------------------------------------------------------

std::vector<std::pair<std::string, TensorRef>> ModelParams::blocks() const {
  return {{"attention_w", attention.weight_vectors},
          {"w_self", w_self},
          {"w_nbr", w_nbr},
          {"b_hidden", b_hidden},
          {"gate_logits", logic.gate_logits},
          {"w_out", w_out},
          {"b_out", b_out}};
}

namespace {

TensorRef glorot(Rng& rng, int rows, int cols, int fan_in, int fan_out) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::vector<double> values(static_cast<std::size_t>(rows) * cols);
  for (auto& v : values) v = rng.uniform(-limit, limit);
  return param(rows, cols, std::move(values));
}

}  // namespace

ModelParams init_model(int f_aug, int num_classes, const TrainConfig& cfg) {
  cfg.validate();
  if (f_aug < 1) throw validation_error("init_model: augmented feature width must be positive");
  if (num_classes < 2) throw validation_error("init_model: need at least two classes");

  const int f_cluster = cfg.cluster_on == ClusterOn::augmented ? f_aug : cfg.hidden;
  const int f_in = f_aug + f_cluster;
  Rng rng = Rng(cfg.seed).fork(rng_stream::params);

  ModelParams params;
  params.attention.heads = cfg.heads;
  params.attention.weight_vectors = glorot(rng, cfg.heads, 2 * f_aug, 2 * f_aug, 1);
  params.w_self = glorot(rng, f_in, cfg.hidden, f_in, cfg.hidden);
  params.w_nbr = glorot(rng, f_in, cfg.hidden, f_in, cfg.hidden);
  params.b_hidden = param(1, cfg.hidden, std::vector<double>(cfg.hidden, 0.0));
  params.logic = make_logic_layer(cfg.logic_neurons, cfg.hidden,
                                  derived_seed(cfg.seed, rng_stream::wiring));
  params.w_out = glorot(rng, cfg.hidden + cfg.logic_neurons, num_classes,
                        cfg.hidden + cfg.logic_neurons, num_classes);
  params.b_out = param(1, num_classes, std::vector<double>(num_classes, 0.0));
  return params;
}

ModelParams clone_params(const ModelParams& params) {
  ModelParams copy = params;
  const auto fresh = [](const TensorRef& t) {
    return param(t->rows, t->cols, t->values);
  };
  copy.attention.weight_vectors = fresh(params.attention.weight_vectors);
  copy.w_self = fresh(params.w_self);
  copy.w_nbr = fresh(params.w_nbr);
  copy.b_hidden = fresh(params.b_hidden);
  copy.logic.gate_logits = fresh(params.logic.gate_logits);
  copy.w_out = fresh(params.w_out);
  copy.b_out = fresh(params.b_out);
  return copy;
}

// --- fused aggregation ops -------------------------------------------------

TensorRef attention_aggregate(Tape& tape, const TensorRef& alpha_kept, const TensorRef& x,
                              const std::vector<std::pair<int, int>>& kept_edges, int num_nodes) {
  const int K = static_cast<int>(kept_edges.size());
  if (alpha_kept->rows != K || alpha_kept->cols != 1) {
    throw validation_error("attention_aggregate: scores " + alpha_kept->shape_str() +
                           " do not match " + std::to_string(K) + " kept edges");
  }
  if (x->rows != num_nodes) {
    throw validation_error("attention_aggregate: features " + x->shape_str() + " vs " +
                           std::to_string(num_nodes) + " nodes");
  }
  for (const auto& [i, j] : kept_edges) {
    if (i < 0 || i >= num_nodes || j < 0 || j >= num_nodes) {
      throw validation_error("attention_aggregate: edge endpoint out of range");
    }
  }
  const int f = x->cols;

  auto score_sums = std::make_shared<std::vector<double>>(num_nodes, 0.0);
  std::vector<double>& s = *score_sums;
  for (int e = 0; e < K; ++e) {
    s[kept_edges[e].first] += alpha_kept->values[e];
    s[kept_edges[e].second] += alpha_kept->values[e];
  }

  TensorRef out = tensor(num_nodes, f);
  for (int e = 0; e < K; ++e) {
    const auto [i, j] = kept_edges[e];
    const double a = alpha_kept->values[e];
    if (s[i] > 0.0) {
      const double w = a / s[i];
      for (int c = 0; c < f; ++c) out->at(i, c) += w * x->at(j, c);
    }
    if (s[j] > 0.0) {
      const double w = a / s[j];
      for (int c = 0; c < f; ++c) out->at(j, c) += w * x->at(i, c);
    }
  }

  track_out(tape, out, alpha_kept->requires_grad || x->requires_grad,
            [alpha_kept, x, out, kept_edges, score_sums, K, f] {
              const std::vector<double>& sums = *score_sums;
              for (int e = 0; e < K; ++e) {
                const auto [i, j] = kept_edges[e];
                const double a = alpha_kept->values[e];
                if (alpha_kept->requires_grad) {
                  double ga = 0.0;
                  if (sums[i] > 0.0) {
                    for (int c = 0; c < f; ++c) {
                      ga += out->grad[static_cast<std::size_t>(i) * f + c] *
                            (x->at(j, c) - out->at(i, c)) / sums[i];
                    }
                  }
                  if (sums[j] > 0.0) {
                    for (int c = 0; c < f; ++c) {
                      ga += out->grad[static_cast<std::size_t>(j) * f + c] *
                            (x->at(i, c) - out->at(j, c)) / sums[j];
                    }
                  }
                  alpha_kept->grad[e] += ga;
                }
                if (x->requires_grad) {
                  if (sums[i] > 0.0) {
                    const double w = a / sums[i];
                    for (int c = 0; c < f; ++c) {
                      x->grad[static_cast<std::size_t>(j) * f + c] +=
                          w * out->grad[static_cast<std::size_t>(i) * f + c];
                    }
                  }
                  if (sums[j] > 0.0) {
                    const double w = a / sums[j];
                    for (int c = 0; c < f; ++c) {
                      x->grad[static_cast<std::size_t>(i) * f + c] +=
                          w * out->grad[static_cast<std::size_t>(j) * f + c];
                    }
                  }
                }
              }
            });
  return out;
}

TensorRef mean_neighbor_agg(Tape& tape, const TensorRef& x,
                            const std::vector<std::pair<int, int>>& edges, int num_nodes) {
  if (x->rows != num_nodes) {
    throw validation_error("mean_neighbor_agg: features " + x->shape_str() + " vs " +
                           std::to_string(num_nodes) + " nodes");
  }
  const int f = x->cols;
  auto inv_deg = std::make_shared<std::vector<double>>(num_nodes, 0.0);
  {
    std::vector<int> deg(num_nodes, 0);
    for (const auto& [i, j] : edges) {
      if (i < 0 || i >= num_nodes || j < 0 || j >= num_nodes) {
        throw validation_error("mean_neighbor_agg: edge endpoint out of range");
      }
      ++deg[i];
      ++deg[j];
    }
    for (int i = 0; i < num_nodes; ++i) (*inv_deg)[i] = 1.0 / (1.0 + deg[i]);
  }

  TensorRef out = tensor(num_nodes, f);
  for (int i = 0; i < num_nodes; ++i) {
    for (int c = 0; c < f; ++c) out->at(i, c) = x->at(i, c);
  }
  for (const auto& [i, j] : edges) {
    for (int c = 0; c < f; ++c) {
      out->at(i, c) += x->at(j, c);
      out->at(j, c) += x->at(i, c);
    }
  }
  for (int i = 0; i < num_nodes; ++i) {
    for (int c = 0; c < f; ++c) out->at(i, c) *= (*inv_deg)[i];
  }

  track_out(tape, out, x->requires_grad, [x, out, edges, inv_deg, num_nodes, f] {
    const std::vector<double>& w = *inv_deg;
    for (int i = 0; i < num_nodes; ++i) {
      for (int c = 0; c < f; ++c) {
        x->grad[static_cast<std::size_t>(i) * f + c] +=
            w[i] * out->grad[static_cast<std::size_t>(i) * f + c];
      }
    }
    for (const auto& [i, j] : edges) {
      for (int c = 0; c < f; ++c) {
        x->grad[static_cast<std::size_t>(j) * f + c] +=
            w[i] * out->grad[static_cast<std::size_t>(i) * f + c];
        x->grad[static_cast<std::size_t>(i) * f + c] +=
            w[j] * out->grad[static_cast<std::size_t>(j) * f + c];
      }
    }
  });
  return out;
}

// --- forward ---------------------------------------------------------------

namespace {

TensorRef hidden_from(Tape& tape, const TensorRef& x_tilde, const TensorRef& alpha_kept,
                      const std::vector<std::pair<int, int>>& kept_edges,
                      const ModelParams& params, int n) {
  const TensorRef agg = attention_aggregate(tape, alpha_kept, x_tilde, kept_edges, n);
  const TensorRef pre = add(tape, add(tape, matmul(tape, x_tilde, params.w_self),
                                      matmul(tape, agg, params.w_nbr)),
                            broadcast_rows(tape, params.b_hidden, n));
  return relu(tape, pre);
}

}  // namespace

TensorRef hidden_representation(Tape& tape, const TensorRef& x_tilde, const RefinedGraph& refined,
                                const ModelParams& params) {
  if (refined.scores.size() != refined.kept_edges.size()) {
    throw validation_error("hidden_representation: refined scores do not cover the kept edges");
  }
  const TensorRef alpha =
      tensor(static_cast<int>(refined.scores.size()), 1, refined.scores);
  return hidden_from(tape, x_tilde, alpha, refined.kept_edges, params, x_tilde->rows);
}

TensorRef forward(Tape& tape, const Graph& g, const ModelParams& params, const TrainConfig& cfg,
                  EpochState& state, ForwardAux& aux, const FixedStructure* fixed) {
  if (g.edges.empty()) throw validation_error("forward: the graph has no edges");
  const int n = g.num_nodes;
  const int k = cfg.resolve_k(g.num_classes);
  const std::uint64_t kmeans_seed = derived_seed(cfg.seed, rng_stream::kmeans);

  if (state.x_aug.rows != n) state.x_aug = augment_features(g);
  const TensorRef x_aug = as_ref(state.x_aug);

  aux.alpha = score_edges(tape, x_aug, g.edges, params.attention);
  if (fixed) {
    aux.refined = fixed->refined;
  } else {
    std::vector<double> scores(aux.alpha->values.begin(), aux.alpha->values.end());
    aux.refined = prune(g, scores, cfg.prune_quantile);
  }
  aux.alpha_kept = row_select(tape, aux.alpha, aux.refined.kept_idx);

  Tensor cf;
  if (fixed) {
    aux.clustering = fixed->clustering;
    const Tensor& basis = cfg.cluster_on == ClusterOn::augmented ? state.x_aug : state.prev_hidden;
    cf = cluster_features(basis, aux.clustering);
  } else if (cfg.cluster_on == ClusterOn::augmented) {
    // The clustering input never changes, so one run serves every epoch.
    if (!state.aug_clustering) state.aug_clustering = kmeans(state.x_aug, k, kmeans_seed);
    aux.clustering = *state.aug_clustering;
    cf = cluster_features(state.x_aug, aux.clustering);
  } else {
    if (state.prev_hidden.rows != n) state.prev_hidden = Tensor(n, cfg.hidden);
    aux.clustering = kmeans(state.prev_hidden, k, kmeans_seed);
    cf = cluster_features(state.prev_hidden, aux.clustering);
  }

  const TensorRef x_tilde = concat_cols(tape, x_aug, as_ref(cf));
  aux.hidden = hidden_from(tape, x_tilde, aux.alpha_kept, aux.refined.kept_edges, params, n);
  aux.logic_out = logic_forward(tape, aux.hidden, params.logic);
  const TensorRef z = concat_cols(tape, aux.hidden, aux.logic_out);
  const TensorRef logits =
      add(tape, matmul(tape, z, params.w_out), broadcast_rows(tape, params.b_out, n));

  // Detached copy for the hidden-variant clustering of the next epoch.
  state.prev_hidden = Tensor(aux.hidden->rows, aux.hidden->cols);
  state.prev_hidden.values = aux.hidden->values;
  return logits;
}

// --- loss ------------------------------------------------------------------

LossParts total_loss(Tape& tape, const TensorRef& logits, const std::vector<int>& labels,
                     const std::vector<int>& train_mask, const ForwardAux& aux,
                     const ModelParams& params, const TrainConfig& cfg, int epoch) {
  if (train_mask.empty()) throw validation_error("total_loss: the train mask is empty");
  std::vector<int> selected_labels;
  selected_labels.reserve(train_mask.size());
  for (int idx : train_mask) {
    if (idx < 0 || idx >= static_cast<int>(labels.size())) {
      throw validation_error("total_loss: train index " + std::to_string(idx) + " out of range");
    }
    selected_labels.push_back(labels[idx]);
  }

  LossParts parts;
  parts.lambda_logic_eff = cfg.lambda_logic_at(epoch);
  const TensorRef ce =
      cross_entropy(tape, row_select(tape, logits, train_mask), selected_labels);
  const TensorRef lg = logic_loss(tape, params.logic);
  const TensorRef pr = mean(tape, aux.alpha_kept);
  parts.ce = ce->at(0, 0);
  parts.logic = lg->at(0, 0);
  parts.prune = pr->at(0, 0);
  parts.total = add(tape, ce, add(tape, scale(tape, lg, parts.lambda_logic_eff),
                                  scale(tape, pr, cfg.lambda_struct)));
  return parts;
}

// --- optimizer -------------------------------------------------------------

AdamState init_adam(const std::vector<std::pair<std::string, TensorRef>>& blocks) {
  AdamState state;
  state.m.reserve(blocks.size());
  state.v.reserve(blocks.size());
  for (const auto& [name, t] : blocks) {
    state.m.emplace_back(t->size(), 0.0);
    state.v.emplace_back(t->size(), 0.0);
  }
  return state;
}

void adam_step(const std::vector<std::pair<std::string, TensorRef>>& blocks, AdamState& state,
               const TrainConfig& cfg) {
  if (state.m.size() != blocks.size() || state.v.size() != blocks.size()) {
    throw validation_error("adam_step: optimizer state does not match the parameter blocks");
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, state.t);
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, state.t);

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& [name, t] = blocks[b];
    if (state.m[b].size() != t->size()) {
      throw validation_error("adam_step: moment shape mismatch in block '" + name + "'");
    }
    t->ensure_grad();
    for (std::size_t i = 0; i < t->size(); ++i) {
      const double gr = t->grad[i];
      if (!std::isfinite(gr)) {
        throw std::runtime_error("adam_step: non-finite gradient in block '" + name + "'");
      }
      state.m[b][i] = cfg.adam_beta1 * state.m[b][i] + (1.0 - cfg.adam_beta1) * gr;
      state.v[b][i] = cfg.adam_beta2 * state.v[b][i] + (1.0 - cfg.adam_beta2) * gr * gr;
      const double m_hat = state.m[b][i] / bc1;
      const double v_hat = state.v[b][i] / bc2;
      t->values[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
      if (!std::isfinite(t->values[i])) {
        throw std::runtime_error("adam_step: non-finite parameter in block '" + name + "'");
      }
    }
  }
}

// --- metrics ---------------------------------------------------------------

std::vector<int> predictions(const Tensor& logits) {
  std::vector<int> preds(logits.rows, 0);
  for (int i = 0; i < logits.rows; ++i) {
    int best = 0;
    for (int c = 1; c < logits.cols; ++c) {
      if (logits.at(i, c) > logits.at(i, best)) best = c;
    }
    preds[i] = best;
  }
  return preds;
}

double accuracy_from_logits(const Tensor& logits, const std::vector<int>& labels,
                            const std::vector<int>& split) {
  if (split.empty()) throw validation_error("accuracy: the split is empty");
  const std::vector<int> preds = predictions(logits);
  int hits = 0;
  for (int idx : split) {
    if (idx < 0 || idx >= logits.rows) {
      throw validation_error("accuracy: split index " + std::to_string(idx) + " out of range");
    }
    if (preds[idx] == labels[idx]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(split.size());
}

std::string metrics_to_jsonl(const RunMetrics& metrics, bool with_timestamp) {
  std::string out;
  for (const EpochRecord& r : metrics.epochs) {
    nlohmann::json line;
    line["epoch"] = r.epoch;
    line["total"] = r.total;
    line["ce"] = r.ce;
    line["logic"] = r.logic;
    line["prune"] = r.prune;
    line["lambda_logic_eff"] = r.lambda_logic_eff;
    line["train_acc"] = r.train_acc;
    line["val_acc"] = r.val_acc;
    line["kept_edges"] = r.kept_edges;
    line["cluster_inertia"] = r.cluster_inertia;
    out += line.dump();
    out += '\n';
  }
  nlohmann::json summary;
  summary["summary"] = true;
  summary["test_acc"] = metrics.test_acc;
  summary["best_epoch"] = metrics.best_epoch;
  summary["best_val_acc"] = metrics.best_val_acc;
  summary["seed"] = metrics.seed;
  summary["config_hash"] = metrics.config_hash;
  if (with_timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    summary["timestamp"] = buf;
  }
  out += summary.dump();
  out += '\n';
  return out;
}

// --- training --------------------------------------------------------------

namespace {

void check_split_cover(const Graph& g, const SplitAssignment& splits) {
  if (splits.train.empty() || splits.val.empty() || splits.test.empty()) {
    throw validation_error("train: every split part must be non-empty");
  }
  for (const std::vector<int>* part : {&splits.train, &splits.val, &splits.test}) {
    for (int idx : *part) {
      if (idx < 0 || idx >= g.num_nodes) {
        throw validation_error("train: split index " + std::to_string(idx) + " out of range");
      }
    }
  }
}

}  // namespace

TrainResult train(const Graph& g, const SplitAssignment& splits, const TrainConfig& cfg) {
  cfg.validate();
  check_split_cover(g, splits);

  EpochState state;
  state.x_aug = augment_features(g);
  ModelParams params = init_model(state.x_aug.cols, g.num_classes, cfg);
  const auto blocks = params.blocks();
  AdamState adam = init_adam(blocks);

  RunMetrics metrics;
  metrics.seed = cfg.seed;
  metrics.config_hash = config_hash(cfg);

  ModelParams best_params = clone_params(params);
  double best_val = -1.0;
  int best_epoch = 0;
  double test_at_best = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Tape tape;
    ForwardAux aux;
    const TensorRef logits = forward(tape, g, params, cfg, state, aux);
    const LossParts parts =
        total_loss(tape, logits, g.labels, splits.train, aux, params, cfg, epoch);

    const double total_value = parts.total->at(0, 0);
    if (!std::isfinite(total_value)) {
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
    }
    const double recomposed =
        parts.ce + parts.lambda_logic_eff * parts.logic + cfg.lambda_struct * parts.prune;
    if (std::abs(total_value - recomposed) > 1e-9) {
      throw std::runtime_error("train: loss composition identity violated at epoch " +
                               std::to_string(epoch));
    }

    EpochRecord record;
    record.epoch = epoch;
    record.total = total_value;
    record.ce = parts.ce;
    record.logic = parts.logic;
    record.prune = parts.prune;
    record.lambda_logic_eff = parts.lambda_logic_eff;
    record.train_acc = accuracy_from_logits(*logits, g.labels, splits.train);
    record.val_acc = accuracy_from_logits(*logits, g.labels, splits.val);
    record.kept_edges = static_cast<int>(aux.refined.kept_edges.size());
    record.cluster_inertia = aux.clustering.inertia;
    metrics.epochs.push_back(record);

    if (record.val_acc > best_val) {
      best_val = record.val_acc;
      best_epoch = epoch;
      best_params = clone_params(params);  // pre-update weights that produced these logits
      test_at_best = accuracy_from_logits(*logits, g.labels, splits.test);
    }

    tape.backward(parts.total);
    adam_step(blocks, adam, cfg);
    for (const auto& [name, t] : blocks) t->zero_grad();

    if (epoch % 50 == 0) {
      log::debug("epoch " + std::to_string(epoch) + " total=" + std::to_string(total_value) +
                 " val_acc=" + std::to_string(record.val_acc));
    }
  }

  metrics.best_epoch = best_epoch;
  metrics.best_val_acc = best_val;
  metrics.test_acc = test_at_best;
  log::info("train: seed " + std::to_string(cfg.seed) + " best_epoch " +
            std::to_string(best_epoch) + " test_acc " + std::to_string(test_at_best));
  return {std::move(best_params), std::move(metrics)};
}

double evaluate(const Graph& g, const ModelParams& params, const TrainConfig& cfg,
                const std::vector<int>& split) {
  if (split.empty()) throw validation_error("evaluate: the split is empty");
  Tape tape;
  EpochState state;
  ForwardAux aux;
  const TensorRef logits = forward(tape, g, params, cfg, state, aux);
  return accuracy_from_logits(*logits, g.labels, split);
}

// --- GCN baseline ----------------------------------------------------------

std::vector<std::pair<std::string, TensorRef>> GcnParams::blocks() const {
  return {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
}

GcnParams init_gcn(int f_aug, int num_classes, const TrainConfig& cfg) {
  Rng rng = Rng(cfg.seed).fork(rng_stream::params);
  GcnParams params;
  params.w1 = glorot(rng, f_aug, cfg.hidden, f_aug, cfg.hidden);
  params.b1 = param(1, cfg.hidden, std::vector<double>(cfg.hidden, 0.0));
  params.w2 = glorot(rng, cfg.hidden, num_classes, cfg.hidden, num_classes);
  params.b2 = param(1, num_classes, std::vector<double>(num_classes, 0.0));
  return params;
}

TensorRef gcn_forward(Tape& tape, const Graph& g, const Tensor& x_aug, const GcnParams& params) {
  const int n = g.num_nodes;
  const TensorRef x = as_ref(x_aug);
  const TensorRef a1 = mean_neighbor_agg(tape, x, g.edges, n);
  const TensorRef h = relu(tape, add(tape, matmul(tape, a1, params.w1),
                                     broadcast_rows(tape, params.b1, n)));
  const TensorRef a2 = mean_neighbor_agg(tape, h, g.edges, n);
  return add(tape, matmul(tape, a2, params.w2), broadcast_rows(tape, params.b2, n));
}

GcnResult gcn_baseline_train(const Graph& g, const SplitAssignment& splits,
                             const TrainConfig& cfg) {
  cfg.validate();
  check_split_cover(g, splits);

  const Tensor x_aug = augment_features(g);
  GcnParams params = init_gcn(x_aug.cols, g.num_classes, cfg);
  const auto blocks = params.blocks();
  AdamState adam = init_adam(blocks);

  RunMetrics metrics;
  metrics.seed = cfg.seed;
  metrics.config_hash = config_hash(cfg);

  GcnParams best_params = params;
  double best_val = -1.0;
  int best_epoch = 0;
  double test_at_best = 0.0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Tape tape;
    const TensorRef logits = gcn_forward(tape, g, x_aug, params);
    std::vector<int> selected_labels;
    selected_labels.reserve(splits.train.size());
    for (int idx : splits.train) selected_labels.push_back(g.labels[idx]);
    const TensorRef ce =
        cross_entropy(tape, row_select(tape, logits, splits.train), selected_labels);

    const double ce_value = ce->at(0, 0);
    if (!std::isfinite(ce_value)) {
      throw std::runtime_error("gcn: non-finite loss at epoch " + std::to_string(epoch));
    }

    EpochRecord record;
    record.epoch = epoch;
    record.total = ce_value;
    record.ce = ce_value;
    record.train_acc = accuracy_from_logits(*logits, g.labels, splits.train);
    record.val_acc = accuracy_from_logits(*logits, g.labels, splits.val);
    record.kept_edges = g.num_edges();
    metrics.epochs.push_back(record);

    if (record.val_acc > best_val) {
      best_val = record.val_acc;
      best_epoch = epoch;
      best_params.w1 = param(params.w1->rows, params.w1->cols, params.w1->values);
      best_params.b1 = param(params.b1->rows, params.b1->cols, params.b1->values);
      best_params.w2 = param(params.w2->rows, params.w2->cols, params.w2->values);
      best_params.b2 = param(params.b2->rows, params.b2->cols, params.b2->values);
      test_at_best = accuracy_from_logits(*logits, g.labels, splits.test);
    }

    tape.backward(ce);
    adam_step(blocks, adam, cfg);
    for (const auto& [name, t] : blocks) t->zero_grad();
  }

  metrics.best_epoch = best_epoch;
  metrics.best_val_acc = best_val;
  metrics.test_acc = test_at_best;
  log::info("gcn: seed " + std::to_string(cfg.seed) + " best_epoch " + std::to_string(best_epoch) +
            " test_acc " + std::to_string(test_at_best));
  return {std::move(best_params), std::move(metrics)};
}

double gcn_evaluate(const Graph& g, const GcnParams& params, const std::vector<int>& split) {
  if (split.empty()) throw validation_error("evaluate: the split is empty");
  Tape tape;
  const Tensor x_aug = augment_features(g);
  const TensorRef logits = gcn_forward(tape, g, x_aug, params);
  return accuracy_from_logits(*logits, g.labels, split);
}

}  // namespace glance
