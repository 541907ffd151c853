#include "spellerssl/io/epb.hpp"

#include <cstring>
#include <limits>

#include "spellerssl/core/error.hpp"
#include "spellerssl/io/binary.hpp"

namespace spellerssl::io {

namespace {
constexpr char kMagic[4] = {'E', 'P', 'B', '1'};
constexpr std::size_t kHeaderBytes = 32;
constexpr std::size_t kRecordBytes = 12;

std::uint32_t to_u32(std::size_t v, const char* field) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(std::string("EPB field ") + field + " does not fit in 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}
}  // namespace

std::vector<unsigned char> encode_epb(const EpochSet& set) {
  set.validate();
  ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint8_t>(kEpbVersion);
  w.put<std::uint8_t>(set.speller ? 1 : 0);
  w.put<std::uint16_t>(0);
  w.put<std::uint32_t>(to_u32(set.size(), "n_trials"));
  w.put<std::uint32_t>(to_u32(set.channels, "n_channels"));
  w.put<std::uint32_t>(to_u32(set.samples, "n_samples"));
  w.put<double>(set.sample_rate_hz);
  w.put<std::uint32_t>(set.repetitions);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& t = set.trials[i];
    w.put(t.label);
    w.put(t.code);
    w.put(t.target_row);
    w.put(t.target_col);
    w.put(t.repetition);
    w.put(t.character);
    w.put_floats(set.trial(i).data(), set.trial_size());
  }
  return w.bytes();
}

EpochSet decode_epb(const std::vector<unsigned char>& bytes, const std::string& what) {
  ByteReader r(bytes, what);
  char magic[4];
  r.get_bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError(what + ": bad magic, not an EPB file");
  const auto version = r.get<std::uint8_t>();
  if (version != kEpbVersion) {
    throw FormatError(what + ": unsupported EPB version " + std::to_string(version));
  }
  const auto flags = r.get<std::uint8_t>();
  if (flags & ~1u) throw FormatError(what + ": unknown flag bits " + std::to_string(flags));
  r.get<std::uint16_t>();
  EpochSet set;
  const std::size_t n = r.get<std::uint32_t>();
  set.channels = r.get<std::uint32_t>();
  set.samples = r.get<std::uint32_t>();
  set.sample_rate_hz = r.get<double>();
  set.repetitions = r.get<std::uint32_t>();
  set.speller = flags & 1u;

  // Size check up front so a corrupt count cannot trigger a huge allocation.
  const std::size_t avail = r.remaining();
  const bool fits = n == 0 || (set.trial_size() <= avail / sizeof(float) &&
                               kRecordBytes + set.trial_size() * sizeof(float) <= avail / n);
  const std::size_t record = fits && n > 0 ? kRecordBytes + set.trial_size() * sizeof(float) : 0;
  if (!fits || avail != n * record) {
    throw FormatError(what + ": " + std::to_string(bytes.size()) + " bytes do not hold " +
                      std::to_string(n) + " trials of " + std::to_string(set.channels) + " x " +
                      std::to_string(set.samples) + " samples (header is " +
                      std::to_string(kHeaderBytes) + " bytes)");
  }
  set.trials.resize(n);
  set.data.resize(n * set.trial_size());
  for (std::size_t i = 0; i < n; ++i) {
    auto& t = set.trials[i];
    t.label = r.get<std::uint8_t>();
    t.code = r.get<std::uint8_t>();
    t.target_row = r.get<std::uint8_t>();
    t.target_col = r.get<std::uint8_t>();
    t.repetition = r.get<std::uint32_t>();
    t.character = r.get<std::uint32_t>();
    r.get_floats(set.trial(i).data(), set.trial_size());
  }
  set.validate();
  return set;
}

void write_epb(const std::string& path, const EpochSet& set) { write_file(path, encode_epb(set)); }

EpochSet read_epb(const std::string& path) { return decode_epb(read_file(path), path); }

}  // namespace spellerssl::io
