#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "spellerssl/decode/grid.hpp"
#include "spellerssl/io/epoch_set.hpp"

namespace spellerssl::decode {

// Per-repetition decision scores of one character, indexed [rep][code-1].
struct ScoreMatrix {
  std::size_t repetitions = 0;
  std::vector<double> scores;

  double at(std::size_t rep, std::uint8_t code) const { return scores[rep * 12 + (code - 1u)]; }
};

struct ScoredCharacter {
  ScoreMatrix scores;
  TargetCodes target;
};

struct Prediction {
  TargetCodes codes;
  char symbol = 0;
};

// S_k(n): sum of the first n repetitions. Throws RangeError unless 1 <= n <= R.
std::array<double, 12> accumulate(const ScoreMatrix& scores, std::size_t n);

// Column = argmax over codes 1..6, row = argmax over 7..12; ties go to the
// lower code.
Prediction predict_character(std::span<const double, 12> cumulative, const SpellerGrid& grid);

// Percentage of characters recognised after n = 1..R repetitions. Throws
// ConfigError for an empty set and DataIntegrityError when R differs.
std::vector<double> crr_curve(std::span<const ScoredCharacter> characters,
                              const SpellerGrid& grid);

// Groups per-trial scores of a speller set by character, repetition and code.
std::vector<ScoredCharacter> score_matrices(const io::EpochSet& set,
                                            std::span<const double> trial_scores);

}  // namespace spellerssl::decode
