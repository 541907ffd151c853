#pragma once

#include <string>
#include <vector>

#include "spellerssl/io/epoch_set.hpp"

namespace spellerssl::io {

// EPB layout, little-endian:
//   header (32 bytes): "EPB1", version u8 (=1), flags u8 (bit 0 = speller),
//     reserved u16, n_trials u32, n_channels u32, n_samples u32,
//     sample_rate_hz f64, n_repetitions u32
//   per trial: label u8, code u8, target_row u8, target_col u8,
//     repetition u32, character u32, then C*L f32 samples channel-major.
inline constexpr std::uint8_t kEpbVersion = 1;

std::vector<unsigned char> encode_epb(const EpochSet& set);
// FormatError on bad magic, version or length; DataIntegrityError when the
// decoded set violates its invariants.
EpochSet decode_epb(const std::vector<unsigned char>& bytes, const std::string& what = "EPB");

void write_epb(const std::string& path, const EpochSet& set);
EpochSet read_epb(const std::string& path);

}  // namespace spellerssl::io
