#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spellerssl/decode/grid.hpp"
#include "spellerssl/io/epoch_set.hpp"

namespace spellerssl::aggregation {

// All R x 12 flashes of one character selection, in presentation order.
struct CharacterBlock {
  char character = 0;        // 0 when the symbol is unknown
  std::uint32_t index = 0;   // position in the session
  std::size_t repetitions = 0;
  std::size_t channels = 0;
  std::size_t samples = 0;
  decode::TargetCodes target;
  std::vector<std::uint8_t> codes;  // [R][12]
  std::vector<float> data;          // [R][12][C][L]

  std::size_t trial_size() const { return channels * samples; }
  std::span<const float> trial(std::size_t rep, std::size_t slot) const;
  std::span<float> trial(std::size_t rep, std::size_t slot);
  std::uint8_t code(std::size_t rep, std::size_t slot) const { return codes[rep * 12 + slot]; }
  bool is_target(std::uint8_t code) const { return code == target.row || code == target.col; }

  // Throws DataIntegrityError naming the offending repetition.
  void validate() const;
};

// Sliding-window means over G consecutive repetitions, codes in canonical
// order (slot k-1 holds code k).
struct AggregatedBlock {
  char character = 0;
  std::uint32_t index = 0;
  std::size_t group = 1;  // G
  std::size_t windows = 0;
  std::size_t channels = 0;
  std::size_t samples = 0;
  decode::TargetCodes target;
  std::array<bool, 12> labels{};  // labels[k-1] for code k
  std::vector<float> data;        // [windows][12][C][L]

  std::size_t trial_size() const { return channels * samples; }
  std::span<const float> trial(std::size_t window, std::uint8_t code) const;
};

// Permutes each repetition so slot k-1 holds code k. Idempotent.
CharacterBlock canonical_reorder(const CharacterBlock& block);

decode::TargetCodes labels_for_character(char symbol, const decode::SpellerGrid& grid);

// Window r (0-based) averages canonical repetitions r..r+G-1, summed in
// ascending repetition order. Throws ConfigError unless 1 <= G <= R.
AggregatedBlock aggregate(const CharacterBlock& block, std::size_t group);

CharacterBlock select_channels(const CharacterBlock& block, std::span<const std::size_t> channels);
AggregatedBlock select_channels(const AggregatedBlock& block,
                                std::span<const std::size_t> channels);

// Splits a validated speller set into per-character blocks.
std::vector<CharacterBlock> blocks_from_epoch_set(const io::EpochSet& set,
                                                  const decode::SpellerGrid& grid = decode::SpellerGrid());

// Inverse of blocks_from_epoch_set for G = 1 without reordering.
io::EpochSet epoch_set_from_blocks(std::span<const CharacterBlock> blocks, double sample_rate_hz);

enum class Execution { kSerial, kParallel };

// Aggregates every block and flattens the windows into a labelled speller set
// (repetitions = R - G + 1, codes canonical). Throws DataIntegrityError when
// the blocks disagree on C, L or R. Both executions give identical output.
io::EpochSet build_training_set(std::span<const CharacterBlock> blocks, std::size_t group,
                                double sample_rate_hz = 240.0,
                                Execution execution = Execution::kParallel);

}  // namespace spellerssl::aggregation
