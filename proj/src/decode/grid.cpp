#include "spellerssl/decode/grid.hpp"

#include <algorithm>

#include "spellerssl/core/error.hpp"

namespace spellerssl::decode {

SpellerGrid::SpellerGrid(std::string_view layout) {
  std::size_t n = 0;
  for (const char c : layout) {
    if (c == '/') continue;
    if (n == 36) throw ConfigError("speller grid has more than 36 symbols");
    cells_[n++] = c;
  }
  if (n != 36) throw ConfigError("speller grid needs 36 symbols, got " + std::to_string(n));
  for (std::size_t i = 0; i < 36; ++i) {
    if (std::find(cells_.begin() + static_cast<std::ptrdiff_t>(i) + 1, cells_.end(), cells_[i]) !=
        cells_.end()) {
      throw ConfigError(std::string("speller grid repeats symbol '") + cells_[i] + "'");
    }
  }
}

char SpellerGrid::symbol(std::uint8_t row_code, std::uint8_t col_code) const {
  if (row_code < 7 || row_code > 12 || col_code < 1 || col_code > 6) {
    throw RangeError("grid codes out of range: row " + std::to_string(row_code) + ", col " +
                     std::to_string(col_code));
  }
  return cells_[static_cast<std::size_t>(row_code - 7) * 6 + (col_code - 1)];
}

TargetCodes SpellerGrid::codes_for(char symbol) const {
  const auto it = std::find(cells_.begin(), cells_.end(), symbol);
  if (it == cells_.end()) {
    throw LookupError(std::string("symbol '") + symbol + "' is not on the speller grid");
  }
  const auto i = static_cast<std::size_t>(it - cells_.begin());
  return {static_cast<std::uint8_t>(7 + i / 6), static_cast<std::uint8_t>(1 + i % 6)};
}

bool SpellerGrid::contains(char symbol) const {
  return std::find(cells_.begin(), cells_.end(), symbol) != cells_.end();
}

std::string SpellerGrid::layout() const {
  std::string out;
  for (std::size_t r = 0; r < 6; ++r) {
    if (r) out += '/';
    out.append(cells_.begin() + static_cast<std::ptrdiff_t>(r * 6),
               cells_.begin() + static_cast<std::ptrdiff_t>(r * 6 + 6));
  }
  return out;
}

}  // namespace spellerssl::decode
