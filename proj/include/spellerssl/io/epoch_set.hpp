#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spellerssl::io {

struct TrialInfo {
  std::uint8_t label = 0;        // 1 = P300 (target flash)
  std::uint8_t code = 0;         // StimulusCode 1..12; 0 for unstructured data
  std::uint8_t target_row = 0;   // row code 7..12 of the character being spelled
  std::uint8_t target_col = 0;   // column code 1..6
  std::uint32_t repetition = 0;  // 0-based within the character
  std::uint32_t character = 0;   // 0-based character index
};

// Trials of identical shape, samples stored trial-major as [N][C][L].
struct EpochSet {
  std::size_t channels = 0;
  std::size_t samples = 0;
  double sample_rate_hz = 240.0;
  std::uint32_t repetitions = 0;
  // Speller-structured sets satisfy the R x 12 permutation layout per
  // character; unstructured sets (pretraining corpora) carry labels and
  // codes of 0.
  bool speller = false;
  std::vector<TrialInfo> trials;
  std::vector<float> data;

  std::size_t size() const { return trials.size(); }
  std::size_t trial_size() const { return channels * samples; }
  std::span<const float> trial(std::size_t i) const;
  std::span<float> trial(std::size_t i);
  void append(const TrialInfo& info, std::span<const float> values);

  // Character count of a speller set (trials / (R * 12)).
  std::size_t characters() const;
  std::size_t positives() const;

  // Throws DataIntegrityError naming the first offending trial.
  void validate() const;
};

// Characters [first, last) of a speller set, renumbered from 0.
EpochSet select_characters(const EpochSet& set, std::size_t first, std::size_t last);

// Number of leading characters kept for a calibration fraction in (0, 1].
std::size_t calibration_characters(std::size_t characters, double fraction);

// First floor(fraction * characters) whole characters. ConfigError when the
// fraction is outside (0, 1] or keeps no character.
EpochSet split_calibration(const EpochSet& set, double fraction);
// The characters split_calibration drops.
EpochSet calibration_complement(const EpochSet& set, double fraction);

}  // namespace spellerssl::io
