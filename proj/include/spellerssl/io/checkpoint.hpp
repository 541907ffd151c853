#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spellerssl/model/layers.hpp"

namespace spellerssl::io {

// Layout, little-endian: "SSCK", version u8 (=1), 3 reserved bytes,
// entry count u32, config_hash u64, training_step u64, seed u64, model JSON
// (u32 length + bytes); then per entry: name (u32 length + bytes), ndim u32,
// dims u32 each, f32 values.
inline constexpr std::uint8_t kCheckpointVersion = 1;

struct CheckpointMetadata {
  std::uint64_t config_hash = 0;
  std::uint64_t training_step = 0;
  std::uint64_t seed = 0;
  std::string model_json;
};

struct CheckpointEntry {
  std::string name;
  core::Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  CheckpointMetadata metadata;
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry* find(const std::string& name) const;
};

// 64-bit FNV-1a, used to fingerprint the model configuration.
std::uint64_t fnv1a64(std::string_view bytes);

Checkpoint make_checkpoint(const model::NamedTensors<float>& tensors, CheckpointMetadata metadata);

std::vector<unsigned char> encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes,
                             const std::string& what = "checkpoint");

void save_checkpoint(const std::string& path, const model::NamedTensors<float>& tensors,
                     const CheckpointMetadata& metadata);
Checkpoint read_checkpoint(const std::string& path);

struct LoadReport {
  std::vector<std::string> loaded;   // target tensors overwritten
  std::vector<std::string> skipped;  // checkpoint entries outside the filter
};

// Copies entries into `target`. With prefixes, only target tensors whose name
// starts with one of them are restored and every one of those must be in the
// checkpoint; without prefixes all target tensors must be. Missing names or
// shape mismatches raise LoadError before anything is written.
LoadReport load_checkpoint(const Checkpoint& checkpoint, const model::NamedTensors<float>& target,
                           std::span<const std::string> prefixes = {});

// Prefixes of the encoder half: "enc." and "bottleneck.".
std::vector<std::string> encoder_prefixes();

}  // namespace spellerssl::io
