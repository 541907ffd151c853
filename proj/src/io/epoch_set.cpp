#include "spellerssl/io/epoch_set.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::io {

std::span<const float> EpochSet::trial(std::size_t i) const {
  return std::span<const float>(data).subspan(i * trial_size(), trial_size());
}

std::span<float> EpochSet::trial(std::size_t i) {
  return std::span<float>(data).subspan(i * trial_size(), trial_size());
}

void EpochSet::append(const TrialInfo& info, std::span<const float> values) {
  if (values.size() != trial_size()) {
    throw DimensionError("EpochSet::append: trial has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(channels) + " x " +
                         std::to_string(samples));
  }
  trials.push_back(info);
  data.insert(data.end(), values.begin(), values.end());
}

std::size_t EpochSet::characters() const {
  if (!speller || repetitions == 0) return 0;
  return trials.size() / (static_cast<std::size_t>(repetitions) * 12);
}

std::size_t EpochSet::positives() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const TrialInfo& t) { return t.label == 1; }));
}

namespace {

[[noreturn]] void fail(std::size_t trial, const std::string& what) {
  throw DataIntegrityError("trial " + std::to_string(trial) + ": " + what);
}

}  // namespace

void EpochSet::validate() const {
  if (channels == 0 || samples == 0) throw DataIntegrityError("epoch set has empty trial shape");
  if (data.size() != trials.size() * trial_size()) {
    throw DataIntegrityError("epoch set holds " + std::to_string(data.size()) +
                             " samples for " + std::to_string(trials.size()) + " trials of " +
                             std::to_string(trial_size()));
  }
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].label > 1) fail(i, "label " + std::to_string(trials[i].label) + " not in {0,1}");
  }
  if (!speller) return;
  if (repetitions == 0) throw DataIntegrityError("speller set declares 0 repetitions");
  const std::size_t block = static_cast<std::size_t>(repetitions) * 12;
  if (trials.size() % block != 0) {
    throw DataIntegrityError("speller set has " + std::to_string(trials.size()) +
                             " trials, not a multiple of R*12 = " + std::to_string(block));
  }
  for (std::size_t start = 0; start < trials.size(); start += block) {
    const std::size_t ch = start / block;
    const TrialInfo& first = trials[start];
    if (first.target_col < 1 || first.target_col > 6) {
      fail(start, "target column code " + std::to_string(first.target_col) + " not in 1..6");
    }
    if (first.target_row < 7 || first.target_row > 12) {
      fail(start, "target row code " + std::to_string(first.target_row) + " not in 7..12");
    }
    for (std::size_t r = 0; r < repetitions; ++r) {
      unsigned seen = 0;
      for (std::size_t j = 0; j < 12; ++j) {
        const std::size_t i = start + r * 12 + j;
        const TrialInfo& t = trials[i];
        if (t.character != ch) {
          fail(i, "character index " + std::to_string(t.character) + ", expected " +
                      std::to_string(ch));
        }
        if (t.repetition != r) {
          fail(i, "repetition index " + std::to_string(t.repetition) + ", expected " +
                      std::to_string(r));
        }
        if (t.target_row != first.target_row || t.target_col != first.target_col) {
          fail(i, "target codes change within a character");
        }
        if (t.code < 1 || t.code > 12) fail(i, "stimulus code " + std::to_string(t.code));
        if (seen & (1u << t.code)) {
          fail(i, "stimulus code " + std::to_string(t.code) + " repeats in repetition " +
                      std::to_string(r));
        }
        seen |= 1u << t.code;
        const bool target = t.code == t.target_row || t.code == t.target_col;
        if (t.label != (target ? 1 : 0)) {
          fail(i, "label " + std::to_string(t.label) + " disagrees with code " +
                      std::to_string(t.code));
        }
      }
    }
  }
}

EpochSet select_characters(const EpochSet& set, std::size_t first, std::size_t last) {
  if (!set.speller) throw DataIntegrityError("character selection needs a speller set");
  if (first > last || last > set.characters()) {
    throw RangeError("character range [" + std::to_string(first) + ", " + std::to_string(last) +
                     ") outside 0.." + std::to_string(set.characters()));
  }
  EpochSet out;
  out.channels = set.channels;
  out.samples = set.samples;
  out.sample_rate_hz = set.sample_rate_hz;
  out.repetitions = set.repetitions;
  out.speller = true;
  const std::size_t per_char = static_cast<std::size_t>(set.repetitions) * 12;
  out.trials.assign(set.trials.begin() + static_cast<std::ptrdiff_t>(first * per_char),
                    set.trials.begin() + static_cast<std::ptrdiff_t>(last * per_char));
  for (auto& t : out.trials) t.character -= static_cast<std::uint32_t>(first);
  out.data.assign(
      set.data.begin() + static_cast<std::ptrdiff_t>(first * per_char * set.trial_size()),
      set.data.begin() + static_cast<std::ptrdiff_t>(last * per_char * set.trial_size()));
  return out;
}

std::size_t calibration_characters(std::size_t characters, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("calibration fraction " + std::to_string(fraction) +
                      " must lie in (0, 1]");
  }
  // The small slack keeps e.g. 0.6 * 85 at 51 despite 0.6 not being exact.
  const auto keep =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(characters) + 1e-9));
  if (keep == 0) {
    throw ConfigError("calibration fraction " + std::to_string(fraction) + " of " +
                      std::to_string(characters) + " characters keeps none");
  }
  return std::min(keep, characters);
}

EpochSet split_calibration(const EpochSet& set, double fraction) {
  return select_characters(set, 0, calibration_characters(set.characters(), fraction));
}

EpochSet calibration_complement(const EpochSet& set, double fraction) {
  return select_characters(set, calibration_characters(set.characters(), fraction),
                           set.characters());
}

}  // namespace spellerssl::io
