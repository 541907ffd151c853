#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace spellerssl::decode {

// Stimulus codes 1..6 flash columns, 7..12 flash rows.
struct TargetCodes {
  std::uint8_t row = 0;  // 7..12
  std::uint8_t col = 0;  // 1..6
  bool operator==(const TargetCodes&) const = default;
};

class SpellerGrid {
 public:
  // Row-major 6x6 layout; rows may be separated by '/'.
  explicit SpellerGrid(std::string_view layout = "ABCDEF/GHIJKL/MNOPQR/STUVWX/YZ1234/56789_");

  char symbol(std::uint8_t row_code, std::uint8_t col_code) const;
  // Throws LookupError when the symbol is not on the grid.
  TargetCodes codes_for(char symbol) const;
  bool contains(char symbol) const;
  std::string layout() const;

 private:
  std::array<char, 36> cells_{};
};

}  // namespace spellerssl::decode
