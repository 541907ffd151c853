#include "spellerssl/decode/decode.hpp"

#include <string>

#include "spellerssl/core/error.hpp"

namespace spellerssl::decode {

std::array<double, 12> accumulate(const ScoreMatrix& scores, std::size_t n) {
  if (n < 1 || n > scores.repetitions) {
    throw RangeError("accumulate: n=" + std::to_string(n) + " outside 1.." +
                     std::to_string(scores.repetitions));
  }
  std::array<double, 12> s{};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < 12; ++k) s[k] += scores.scores[r * 12 + k];
  return s;
}

Prediction predict_character(std::span<const double, 12> cumulative, const SpellerGrid& grid) {
  std::size_t col = 0, row = 6;
  for (std::size_t k = 1; k < 6; ++k)
    if (cumulative[k] > cumulative[col]) col = k;
  for (std::size_t k = 7; k < 12; ++k)
    if (cumulative[k] > cumulative[row]) row = k;
  Prediction p;
  p.codes = {static_cast<std::uint8_t>(row + 1), static_cast<std::uint8_t>(col + 1)};
  p.symbol = grid.symbol(p.codes.row, p.codes.col);
  return p;
}

std::vector<double> crr_curve(std::span<const ScoredCharacter> characters,
                              const SpellerGrid& grid) {
  if (characters.empty()) throw ConfigError("crr_curve: no characters to decode");
  const std::size_t reps = characters.front().scores.repetitions;
  for (std::size_t c = 0; c < characters.size(); ++c) {
    if (characters[c].scores.repetitions != reps) {
      throw DataIntegrityError("crr_curve: character " + std::to_string(c) + " has " +
                               std::to_string(characters[c].scores.repetitions) +
                               " repetitions, expected " + std::to_string(reps));
    }
  }
  std::vector<double> crr(reps, 0.0);
  for (const auto& ch : characters) {
    std::array<double, 12> s{};
    for (std::size_t n = 1; n <= reps; ++n) {
      for (std::size_t k = 0; k < 12; ++k) s[k] += ch.scores.scores[(n - 1) * 12 + k];
      if (predict_character(s, grid).codes == ch.target) crr[n - 1] += 1.0;
    }
  }
  for (auto& v : crr) v = 100.0 * v / static_cast<double>(characters.size());
  return crr;
}

std::vector<ScoredCharacter> score_matrices(const io::EpochSet& set,
                                            std::span<const double> trial_scores) {
  if (!set.speller) throw DataIntegrityError("score_matrices: epoch set is not speller-structured");
  if (trial_scores.size() != set.size()) {
    throw DimensionError("score_matrices: " + std::to_string(trial_scores.size()) +
                         " scores for " + std::to_string(set.size()) + " trials");
  }
  set.validate();
  const std::size_t reps = set.repetitions;
  const std::size_t per_char = reps * 12;
  std::vector<ScoredCharacter> out(set.characters());
  for (std::size_t c = 0; c < out.size(); ++c) {
    auto& ch = out[c];
    ch.scores.repetitions = reps;
    ch.scores.scores.assign(per_char, 0.0);
    const auto& first = set.trials[c * per_char];
    ch.target = {first.target_row, first.target_col};
    for (std::size_t i = 0; i < per_char; ++i) {
      const auto& t = set.trials[c * per_char + i];
      ch.scores.scores[t.repetition * 12 + (t.code - 1u)] = trial_scores[c * per_char + i];
    }
  }
  return out;
}

}  // namespace spellerssl::decode
