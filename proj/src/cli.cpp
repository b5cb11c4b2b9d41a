#include "glance/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "glance/checkpoint.hpp"
#include "glance/error.hpp"
#include "glance/graph.hpp"
#include "glance/log.hpp"
#include "glance/model.hpp"
#include "glance/refine.hpp"
#include "glance/rng.hpp"

namespace glance {

namespace {

TrainConfig read_config(const std::string& path) {
  if (path.empty()) {
    return TrainConfig{};
  }
  std::ifstream in(path);
  if (!in) {
    throw validation_error("cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

void write_text(const std::string& path, const std::string& text,
                std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw validation_error("cannot write output file: " + path);
  }
  out << text;
  if (!out) {
    throw validation_error("short write to output file: " + path);
  }
}

SplitAssignment splits_for(const Graph& g, const TrainConfig& cfg) {
  return make_splits(g, cfg.split, derived_seed(cfg.seed, rng_stream::splits));
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(item, &pos);
    } catch (const std::exception&) {
      throw validation_error("invalid seed list entry: '" + item + "'");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) {
      ++pos;
    }
    if (pos != item.size()) {
      throw validation_error("invalid seed list entry: '" + item + "'");
    }
    seeds.push_back(value);
  }
  if (seeds.empty()) {
    throw validation_error("--seeds requires at least one seed");
  }
  return seeds;
}

std::string summary_line(const RunMetrics& metrics) {
  std::ostringstream line;
  line << "test_acc=" << metrics.test_acc << " best_epoch=" << metrics.best_epoch
       << " seed=" << metrics.seed << "\n";
  return line.str();
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              std::int64_t seed_override, const std::string& out_path,
              const std::string& checkpoint_path, bool no_timestamp,
              std::ostream& out) {
  TrainConfig cfg = read_config(config_path);
  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
  }
  cfg.validate();
  Graph g = load_dataset(data_dir);
  SplitAssignment splits = splits_for(g, cfg);
  TrainResult result = train(g, splits, cfg);
  write_text(out_path, metrics_to_jsonl(result.metrics, !no_timestamp), out);
  if (!checkpoint_path.empty()) {
    save_checkpoint(checkpoint_path, result.params, cfg);
  }
  out << summary_line(result.metrics);
  return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& checkpoint_path,
             const std::string& split_name, std::ostream& out) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Graph g = load_dataset(data_dir);
  SplitAssignment splits = splits_for(g, ckpt.config);
  const std::vector<int>* split = nullptr;
  if (split_name == "train") {
    split = &splits.train;
  } else if (split_name == "val") {
    split = &splits.val;
  } else if (split_name == "test") {
    split = &splits.test;
  } else {
    throw validation_error("unknown split: " + split_name);
  }
  double acc = evaluate(g, ckpt.params, ckpt.config, *split);
  nlohmann::json result;
  result["accuracy"] = acc;
  result["split"] = split_name;
  result["split_size"] = split->size();
  result["seed"] = ckpt.config.seed;
  result["config_hash"] = config_hash(ckpt.config);
  out << result.dump(2) << "\n";
  return 0;
}

int cmd_inspect_graph(const std::string& data_dir, const std::string& config_path,
                      std::int64_t seed_override, std::ostream& out) {
  TrainConfig cfg = read_config(config_path);
  if (seed_override >= 0) {
    cfg.seed = static_cast<std::uint64_t>(seed_override);
  }
  cfg.validate();
  Graph g = load_dataset(data_dir);
  if (g.num_edges() == 0) {
    throw validation_error("dataset has no edges to inspect");
  }
  Tensor x_aug = augment_features(g);
  ModelParams params = init_model(x_aug.cols, g.num_classes, cfg);
  Tape tape;
  TensorRef features = tensor(x_aug.rows, x_aug.cols, x_aug.values);
  TensorRef alpha = score_edges(tape, features, g.edges, params.attention);
  RefinedGraph refined = prune(g, alpha->values, cfg.prune_quantile);
  std::vector<bool> kept(g.edges.size(), false);
  for (int idx : refined.kept_idx) {
    kept[static_cast<std::size_t>(idx)] = true;
  }
  nlohmann::json result;
  result["quantile"] = cfg.prune_quantile;
  result["threshold"] = refined.threshold;
  result["num_edges"] = g.num_edges();
  result["kept_count"] = refined.kept_edges.size();
  result["seed"] = cfg.seed;
  nlohmann::json edge_list = nlohmann::json::array();
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    edge_list.push_back({{"src", g.edges[e].first},
                         {"dst", g.edges[e].second},
                         {"alpha", alpha->values[e]},
                         {"kept", static_cast<bool>(kept[e])}});
  }
  result["edges"] = std::move(edge_list);
  out << result.dump(2) << "\n";
  return 0;
}

int cmd_explain(const std::string& checkpoint_path, std::ostream& out) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  out << harden_json(ckpt.params.logic) << "\n";
  return 0;
}

int cmd_stats(const std::string& data_dir, std::ostream& out) {
  Graph g = load_dataset(data_dir);
  DatasetStats stats = dataset_stats(g);
  nlohmann::json result;
  result["nodes"] = stats.nodes;
  result["edges"] = stats.edges;
  result["avg_degree"] = stats.avg_degree;
  result["feature_dim"] = stats.feature_dim;
  result["classes"] = stats.classes;
  result["homophily"] = stats.homophily;
  out << result.dump(2) << "\n";
  return 0;
}

int cmd_seed_sweep(const std::string& data_dir, const std::string& config_path,
                   const std::string& seeds_text, const std::string& model,
                   const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
  if (model != "glance" && model != "gcn") {
    throw validation_error("--model must be 'glance' or 'gcn'");
  }
  TrainConfig base_cfg = read_config(config_path);
  std::vector<std::uint64_t> seeds = parse_seed_list(seeds_text);
  Graph g = load_dataset(data_dir);

  nlohmann::json result;
  result["model"] = model;
  result["seeds"] = seeds;
  std::vector<double> accuracies;
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = base_cfg;
    cfg.seed = seed;
    cfg.validate();
    try {
      SplitAssignment splits = splits_for(g, cfg);
      double acc = 0.0;
      if (model == "glance") {
        acc = train(g, splits, cfg).metrics.test_acc;
      } else {
        acc = gcn_baseline_train(g, splits, cfg).metrics.test_acc;
      }
      accuracies.push_back(acc);
      log::info("seed " + std::to_string(seed) +
                " test_acc=" + std::to_string(acc));
    } catch (const std::exception& e) {
      result["accuracies"] = accuracies;
      result["completed"] = accuracies.size();
      result["failed_seed"] = seed;
      result["error"] = e.what();
      write_text(out_path, result.dump(2) + "\n", out);
      err << "error: seed " << seed << " failed: " << e.what() << "\n";
      return 2;
    }
  }
  double mean = 0.0;
  for (double a : accuracies) {
    mean += a;
  }
  mean /= static_cast<double>(accuracies.size());
  double var = 0.0;
  for (double a : accuracies) {
    var += (a - mean) * (a - mean);
  }
  var /= static_cast<double>(accuracies.size());
  result["accuracies"] = accuracies;
  result["mean"] = mean;
  result["std"] = std::sqrt(var);
  write_text(out_path, result.dump(2) + "\n", out);
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"GLANCE: attention-refined graph learning with cluster and logic heads"};
  app.require_subcommand(1);

  std::string data_dir;
  std::string config_path;
  std::int64_t seed_override = -1;
  std::string out_path;
  std::string checkpoint_path;
  std::string split_name = "test";
  std::string seeds_text;
  std::string model = "glance";
  bool no_timestamp = false;

  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and emit metrics");
  train_cmd->add_option("--data", data_dir, "Dataset directory")->required();
  train_cmd->add_option("--config", config_path, "Config JSON file (defaults applied when absent)");
  train_cmd->add_option("--seed", seed_override, "Seed override")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--out", out_path, "Metrics output file (stdout when absent)");
  train_cmd->add_option("--checkpoint", checkpoint_path, "Write the best-epoch checkpoint here");
  train_cmd->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp for byte-stable output");

  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset split");
  eval_cmd->add_option("--data", data_dir, "Dataset directory")->required();
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint manifest path")->required();
  eval_cmd->add_option("--split", split_name, "Split to score: train, val, or test");

  CLI::App* inspect_cmd =
      app.add_subcommand("inspect-graph", "Emit per-edge attention scores and kept status");
  inspect_cmd->add_option("--data", data_dir, "Dataset directory")->required();
  inspect_cmd->add_option("--config", config_path, "Config JSON file");
  inspect_cmd->add_option("--seed", seed_override, "Seed override")->check(CLI::NonNegativeNumber);

  CLI::App* explain_cmd = app.add_subcommand("explain", "Emit the hardened logic circuit");
  explain_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint manifest path")->required();

  CLI::App* stats_cmd = app.add_subcommand("stats", "Emit dataset statistics");
  stats_cmd->add_option("--data", data_dir, "Dataset directory")->required();

  CLI::App* sweep_cmd = app.add_subcommand("seed-sweep", "Train across seeds and summarize");
  sweep_cmd->add_option("--data", data_dir, "Dataset directory")->required();
  sweep_cmd->add_option("--config", config_path, "Config JSON file");
  sweep_cmd->add_option("--seeds", seeds_text, "Comma-separated seed list")->required();
  sweep_cmd->add_option("--model", model, "Model to sweep: glance or gcn");
  sweep_cmd->add_option("--out", out_path, "Summary output file (stdout when absent)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) {
      return cmd_train(data_dir, config_path, seed_override, out_path,
                       checkpoint_path, no_timestamp, out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(data_dir, checkpoint_path, split_name, out);
    }
    if (inspect_cmd->parsed()) {
      return cmd_inspect_graph(data_dir, config_path, seed_override, out);
    }
    if (explain_cmd->parsed()) {
      return cmd_explain(checkpoint_path, out);
    }
    if (stats_cmd->parsed()) {
      return cmd_stats(data_dir, out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_seed_sweep(data_dir, config_path, seeds_text, model, out_path,
                            out, err);
    }
    err << "error: no command given\n";
    return 1;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace glance
