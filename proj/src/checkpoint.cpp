#include "glance/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "glance/error.hpp"

namespace glance {

namespace {

constexpr const char* kFormat = "glance-checkpoint-v1";

void write_doubles_le(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw validation_error("cannot write checkpoint data file: " + path);
  }
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) {
      bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    out.write(bytes, 8);
  }
  if (!out) {
    throw validation_error("short write to checkpoint data file: " + path);
  }
}

std::vector<double> read_doubles_le(const std::string& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw validation_error("cannot open checkpoint data file: " + path);
  }
  std::vector<char> raw(count * 8);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw validation_error("checkpoint data file truncated: " + path);
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw validation_error("checkpoint data file has trailing bytes: " + path);
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(raw[i * 8 + b]))
              << (8 * b);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const TrainConfig& cfg) {
  auto blocks = params.blocks();
  nlohmann::json manifest;
  manifest["format"] = kFormat;
  manifest["config"] = nlohmann::json::parse(config_to_json(cfg));
  manifest["f_aug"] = params.attention.weight_vectors->cols / 2;
  manifest["num_classes"] = params.b_out->cols;
  std::string bin_name =
      std::filesystem::path(path).filename().string() + ".bin";
  manifest["params_file"] = bin_name;
  nlohmann::json block_list = nlohmann::json::array();
  std::vector<double> values;
  for (const auto& [name, tensor] : blocks) {
    block_list.push_back(
        {{"name", name}, {"rows", tensor->rows}, {"cols", tensor->cols}});
    values.insert(values.end(), tensor->values.begin(), tensor->values.end());
  }
  manifest["blocks"] = std::move(block_list);

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw validation_error("cannot write checkpoint manifest: " + path);
  }
  out << manifest.dump(2) << "\n";
  if (!out) {
    throw validation_error("short write to checkpoint manifest: " + path);
  }
  out.close();
  write_doubles_le(
      (std::filesystem::path(path).parent_path() / bin_name).string(), values);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw validation_error("cannot open checkpoint manifest: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("malformed checkpoint manifest " + path + ": " +
                           e.what());
  }

  Checkpoint ckpt;
  try {
    if (manifest.at("format").get<std::string>() != kFormat) {
      throw validation_error("unsupported checkpoint format in " + path);
    }
    ckpt.config = config_from_json(manifest.at("config").dump());
    ckpt.f_aug = manifest.at("f_aug").get<int>();
    ckpt.num_classes = manifest.at("num_classes").get<int>();
    if (ckpt.f_aug < 1 || ckpt.num_classes < 1) {
      throw validation_error("invalid model dimensions in " + path);
    }
    ckpt.params = init_model(ckpt.f_aug, ckpt.num_classes, ckpt.config);

    auto blocks = ckpt.params.blocks();
    const auto& block_list = manifest.at("blocks");
    if (block_list.size() != blocks.size()) {
      throw validation_error("checkpoint block count mismatch in " + path);
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& entry = block_list.at(i);
      const auto& [name, tensor] = blocks[i];
      if (entry.at("name").get<std::string>() != name ||
          entry.at("rows").get<int>() != tensor->rows ||
          entry.at("cols").get<int>() != tensor->cols) {
        throw validation_error("checkpoint block '" + name +
                               "' does not match manifest in " + path);
      }
      total += tensor->values.size();
    }

    std::string bin_path =
        (std::filesystem::path(path).parent_path() /
         manifest.at("params_file").get<std::string>())
            .string();
    auto values = read_doubles_le(bin_path, total);
    std::size_t offset = 0;
    for (auto& [name, tensor] : blocks) {
      std::copy(values.begin() + static_cast<std::ptrdiff_t>(offset),
                values.begin() +
                    static_cast<std::ptrdiff_t>(offset + tensor->values.size()),
                tensor->values.begin());
      offset += tensor->values.size();
    }
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("malformed checkpoint manifest " + path + ": " +
                           e.what());
  }
  return ckpt;
}

}  // namespace glance
