#include "spellerssl/aggregation/aggregate.hpp"

#include <algorithm>
#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::aggregation {

std::span<const float> CharacterBlock::trial(std::size_t rep, std::size_t slot) const {
  return std::span<const float>(data).subspan((rep * 12 + slot) * trial_size(), trial_size());
}

std::span<float> CharacterBlock::trial(std::size_t rep, std::size_t slot) {
  return std::span<float>(data).subspan((rep * 12 + slot) * trial_size(), trial_size());
}

std::span<const float> AggregatedBlock::trial(std::size_t window, std::uint8_t code) const {
  return std::span<const float>(data).subspan((window * 12 + (code - 1u)) * trial_size(),
                                              trial_size());
}

void CharacterBlock::validate() const {
  if (repetitions == 0) throw DataIntegrityError("character block has no repetitions");
  if (codes.size() != repetitions * 12 || data.size() != repetitions * 12 * trial_size()) {
    throw DataIntegrityError("character block " + std::to_string(index) +
                             ": storage does not match " + std::to_string(repetitions) +
                             " repetitions x 12 trials");
  }
  if (target.col < 1 || target.col > 6 || target.row < 7 || target.row > 12) {
    throw DataIntegrityError("character block " + std::to_string(index) +
                             ": target codes must be one column (1..6) and one row (7..12)");
  }
  for (std::size_t r = 0; r < repetitions; ++r) {
    unsigned seen = 0;
    for (std::size_t j = 0; j < 12; ++j) {
      const unsigned c = code(r, j);
      if (c < 1 || c > 12) {
        throw DataIntegrityError("character block " + std::to_string(index) + ", repetition " +
                                 std::to_string(r) + ": code " + std::to_string(c) +
                                 " is outside 1..12");
      }
      if (seen & (1u << c)) {
        throw DataIntegrityError("character block " + std::to_string(index) + ", repetition " +
                                 std::to_string(r) + ": duplicate code " + std::to_string(c));
      }
      seen |= 1u << c;
    }
  }
}

CharacterBlock canonical_reorder(const CharacterBlock& block) {
  block.validate();
  CharacterBlock out = block;
  const std::size_t n = block.trial_size();
  for (std::size_t r = 0; r < block.repetitions; ++r) {
    for (std::size_t j = 0; j < 12; ++j) {
      const std::size_t k = block.code(r, j) - 1u;
      out.codes[r * 12 + k] = block.code(r, j);
      std::copy_n(block.trial(r, j).data(), n, out.trial(r, k).data());
    }
  }
  return out;
}

decode::TargetCodes labels_for_character(char symbol, const decode::SpellerGrid& grid) {
  return grid.codes_for(symbol);
}

AggregatedBlock aggregate(const CharacterBlock& block, std::size_t group) {
  if (group < 1 || group > block.repetitions) {
    throw ConfigError("aggregation group size G=" + std::to_string(group) +
                      " must lie in 1.." + std::to_string(block.repetitions));
  }
  const CharacterBlock ordered = canonical_reorder(block);
  AggregatedBlock out;
  out.character = block.character;
  out.index = block.index;
  out.group = group;
  out.windows = block.repetitions - group + 1;
  out.channels = block.channels;
  out.samples = block.samples;
  out.target = block.target;
  for (std::uint8_t k = 1; k <= 12; ++k) out.labels[k - 1u] = block.is_target(k);

  const std::size_t n = block.trial_size();
  const auto g = static_cast<float>(group);
  out.data.assign(out.windows * 12 * n, 0.0f);
  std::vector<float> acc(n);
  for (std::size_t w = 0; w < out.windows; ++w) {
    for (std::size_t k = 0; k < 12; ++k) {
      std::fill(acc.begin(), acc.end(), 0.0f);
      for (std::size_t t = w; t < w + group; ++t) {
        const float* src = ordered.trial(t, k).data();
        for (std::size_t i = 0; i < n; ++i) acc[i] += src[i];
      }
      float* dst = out.data.data() + (w * 12 + k) * n;
      for (std::size_t i = 0; i < n; ++i) dst[i] = acc[i] / g;
    }
  }
  return out;
}

namespace {

void check_channels(std::span<const std::size_t> channels, std::size_t available) {
  if (channels.empty()) throw ConfigError("channel selection is empty");
  for (const auto c : channels) {
    if (c >= available) {
      throw RangeError("channel " + std::to_string(c) + " out of range (have " +
                       std::to_string(available) + ")");
    }
  }
}

std::vector<float> pick(std::span<const float> data, std::size_t trials, std::size_t channels,
                        std::size_t samples, std::span<const std::size_t> keep) {
  std::vector<float> out(trials * keep.size() * samples);
  for (std::size_t t = 0; t < trials; ++t)
    for (std::size_t i = 0; i < keep.size(); ++i)
      std::copy_n(data.data() + (t * channels + keep[i]) * samples, samples,
                  out.data() + (t * keep.size() + i) * samples);
  return out;
}

}  // namespace

CharacterBlock select_channels(const CharacterBlock& block,
                               std::span<const std::size_t> channels) {
  check_channels(channels, block.channels);
  CharacterBlock out = block;
  out.channels = channels.size();
  out.data = pick(block.data, block.repetitions * 12, block.channels, block.samples, channels);
  return out;
}

AggregatedBlock select_channels(const AggregatedBlock& block,
                                std::span<const std::size_t> channels) {
  check_channels(channels, block.channels);
  AggregatedBlock out = block;
  out.channels = channels.size();
  out.data = pick(block.data, block.windows * 12, block.channels, block.samples, channels);
  return out;
}

std::vector<CharacterBlock> blocks_from_epoch_set(const io::EpochSet& set,
                                                  const decode::SpellerGrid& grid) {
  if (!set.speller) throw DataIntegrityError("epoch set is not speller-structured");
  set.validate();
  const std::size_t per_char = static_cast<std::size_t>(set.repetitions) * 12;
  const std::size_t n = set.trial_size();
  std::vector<CharacterBlock> blocks(set.characters());
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    auto& b = blocks[c];
    const auto& first = set.trials[c * per_char];
    b.index = first.character;
    b.repetitions = set.repetitions;
    b.channels = set.channels;
    b.samples = set.samples;
    b.target = {first.target_row, first.target_col};
    b.character = grid.symbol(b.target.row, b.target.col);
    b.codes.resize(per_char);
    for (std::size_t i = 0; i < per_char; ++i) b.codes[i] = set.trials[c * per_char + i].code;
    b.data.assign(set.data.begin() + static_cast<std::ptrdiff_t>(c * per_char * n),
                  set.data.begin() + static_cast<std::ptrdiff_t>((c + 1) * per_char * n));
  }
  return blocks;
}

io::EpochSet epoch_set_from_blocks(std::span<const CharacterBlock> blocks,
                                   double sample_rate_hz) {
  io::EpochSet set;
  set.sample_rate_hz = sample_rate_hz;
  set.speller = true;
  if (blocks.empty()) return set;
  set.channels = blocks.front().channels;
  set.samples = blocks.front().samples;
  set.repetitions = static_cast<std::uint32_t>(blocks.front().repetitions);
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    const auto& b = blocks[c];
    b.validate();
    if (b.channels != set.channels || b.samples != set.samples ||
        b.repetitions != set.repetitions) {
      throw DataIntegrityError("character block " + std::to_string(c) +
                               " differs in shape from block 0");
    }
    for (std::size_t r = 0; r < b.repetitions; ++r)
      for (std::size_t j = 0; j < 12; ++j) {
        const auto code = b.code(r, j);
        set.append({static_cast<std::uint8_t>(b.is_target(code) ? 1 : 0), code, b.target.row,
                    b.target.col, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)},
                   b.trial(r, j));
      }
  }
  return set;
}

io::EpochSet build_training_set(std::span<const CharacterBlock> blocks, std::size_t group,
                                double sample_rate_hz, Execution execution) {
  if (blocks.empty()) throw ConfigError("build_training_set: no character blocks");
  const auto& ref = blocks.front();
  for (std::size_t c = 1; c < blocks.size(); ++c) {
    const auto& b = blocks[c];
    if (b.channels != ref.channels || b.samples != ref.samples ||
        b.repetitions != ref.repetitions) {
      throw DataIntegrityError(
          "build_training_set: block " + std::to_string(c) + " has C=" +
          std::to_string(b.channels) + ", L=" + std::to_string(b.samples) + ", R=" +
          std::to_string(b.repetitions) + " but block 0 has C=" + std::to_string(ref.channels) +
          ", L=" + std::to_string(ref.samples) + ", R=" + std::to_string(ref.repetitions));
    }
  }
  if (group < 1 || group > ref.repetitions) {
    throw ConfigError("aggregation group size G=" + std::to_string(group) +
                      " must lie in 1.." + std::to_string(ref.repetitions));
  }
  const std::size_t windows = ref.repetitions - group + 1;
  const std::size_t n = ref.trial_size();
  const std::size_t per_char = windows * 12;

  io::EpochSet set;
  set.channels = ref.channels;
  set.samples = ref.samples;
  set.sample_rate_hz = sample_rate_hz;
  set.repetitions = static_cast<std::uint32_t>(windows);
  set.speller = true;
  set.trials.resize(blocks.size() * per_char);
  set.data.resize(blocks.size() * per_char * n);

  // Each character writes a disjoint slice, so the result does not depend on
  // scheduling.
  auto fill = [&](std::size_t c) {
    const AggregatedBlock agg = aggregate(blocks[c], group);
    for (std::size_t w = 0; w < windows; ++w)
      for (std::uint8_t k = 1; k <= 12; ++k) {
        set.trials[c * per_char + w * 12 + (k - 1u)] = {
            static_cast<std::uint8_t>(agg.labels[k - 1u] ? 1 : 0), k, agg.target.row,
            agg.target.col, static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(c)};
      }
    std::copy(agg.data.begin(), agg.data.end(),
              set.data.begin() + static_cast<std::ptrdiff_t>(c * per_char * n));
  };
  const auto count = static_cast<std::ptrdiff_t>(blocks.size());
  if (execution == Execution::kSerial) {
    for (std::ptrdiff_t c = 0; c < count; ++c) fill(static_cast<std::size_t>(c));
  } else {
    // Exceptions may not cross the parallel region; record the first one.
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
      try {
        fill(static_cast<std::size_t>(c));
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }
  return set;
}

}  // namespace spellerssl::aggregation
