#pragma once

#include <string>

#include "glance/model.hpp"

namespace glance {

struct Checkpoint {
  ModelParams params;
  TrainConfig config;
  int f_aug = 0;
  int num_classes = 0;
};

// Writes a JSON manifest at `path` (config, shapes, block order) plus a
// sibling `<path>.bin` holding every parameter as a little-endian 64-bit
// double in manifest order.
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const TrainConfig& cfg);

// Rebuilds the model from the manifest and overwrites its values from the
// binary file. Missing files, malformed JSON, or shape/size mismatches
// raise validation_error naming the offending path.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace glance
