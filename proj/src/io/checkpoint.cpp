#include "spellerssl/io/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <set>
#include <unordered_map>

#include "spellerssl/core/error.hpp"
#include "spellerssl/io/binary.hpp"

namespace spellerssl::io {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'C', 'K'};

void put_string(ByteWriter& w, const std::string& s) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
  w.put_bytes(s.data(), s.size());
}

std::string get_string(ByteReader& r) {
  const std::size_t n = r.get<std::uint32_t>();
  r.need(n);
  std::string s(n, '\0');
  r.get_bytes(s.data(), n);
  return s;
}

bool matches(const std::string& name, std::span<const std::string> prefixes) {
  if (prefixes.empty()) return true;
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](const std::string& p) { return name.rfind(p, 0) == 0; });
}

}  // namespace

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Checkpoint make_checkpoint(const model::NamedTensors<float>& tensors,
                           CheckpointMetadata metadata) {
  Checkpoint ck;
  ck.metadata = std::move(metadata);
  std::set<std::string> seen;
  for (const auto& t : tensors) {
    if (!seen.insert(t.name).second) throw StateError("duplicate tensor name '" + t.name + "'");
    const auto v = t.tensor.values();
    ck.entries.push_back({t.name, t.tensor.shape(), std::vector<float>(v.begin(), v.end())});
  }
  return ck;
}

std::vector<unsigned char> encode_checkpoint(const Checkpoint& ck) {
  ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put<std::uint8_t>(kCheckpointVersion);
  w.put<std::uint8_t>(0);
  w.put<std::uint16_t>(0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(ck.entries.size()));
  w.put<std::uint64_t>(ck.metadata.config_hash);
  w.put<std::uint64_t>(ck.metadata.training_step);
  w.put<std::uint64_t>(ck.metadata.seed);
  put_string(w, ck.metadata.model_json);
  for (const auto& e : ck.entries) {
    put_string(w, e.name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(e.shape.size()));
    for (const auto d : e.shape) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
    w.put_floats(e.values.data(), e.values.size());
  }
  return w.bytes();
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes, const std::string& what) {
  ByteReader r(bytes, what);
  char magic[4];
  r.get_bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError(what + ": bad magic, not a checkpoint");
  const auto version = r.get<std::uint8_t>();
  if (version != kCheckpointVersion) {
    throw FormatError(what + ": unsupported checkpoint version " + std::to_string(version));
  }
  r.get<std::uint8_t>();
  r.get<std::uint16_t>();
  const std::size_t count = r.get<std::uint32_t>();
  Checkpoint ck;
  ck.metadata.config_hash = r.get<std::uint64_t>();
  ck.metadata.training_step = r.get<std::uint64_t>();
  ck.metadata.seed = r.get<std::uint64_t>();
  ck.metadata.model_json = get_string(r);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    e.name = get_string(r);
    if (!seen.insert(e.name).second) throw FormatError(what + ": duplicate entry '" + e.name + "'");
    const std::size_t ndim = r.get<std::uint32_t>();
    r.need(ndim * 4);
    std::size_t numel = 1;
    for (std::size_t d = 0; d < ndim; ++d) {
      e.shape.push_back(r.get<std::uint32_t>());
      if (e.shape.back() != 0 && numel > r.remaining() / e.shape.back()) {
        throw FormatError(what + ": entry '" + e.name + "' is larger than the file");
      }
      numel *= e.shape.back();
    }
    r.need(numel * sizeof(float));
    e.values.resize(numel);
    r.get_floats(e.values.data(), numel);
    ck.entries.push_back(std::move(e));
  }
  if (r.remaining() != 0) {
    throw FormatError(what + ": " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return ck;
}

void save_checkpoint(const std::string& path, const model::NamedTensors<float>& tensors,
                     const CheckpointMetadata& metadata) {
  write_file(path, encode_checkpoint(make_checkpoint(tensors, metadata)));
}

Checkpoint read_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path), path);
}

LoadReport load_checkpoint(const Checkpoint& ck, const model::NamedTensors<float>& target,
                           std::span<const std::string> prefixes) {
  std::unordered_map<std::string, const CheckpointEntry*> by_name;
  for (const auto& e : ck.entries) by_name.emplace(e.name, &e);

  std::vector<std::string> missing;
  std::vector<std::pair<const model::NamedTensor<float>*, const CheckpointEntry*>> plan;
  for (const auto& t : target) {
    if (!matches(t.name, prefixes)) continue;
    const auto it = by_name.find(t.name);
    if (it == by_name.end()) {
      missing.push_back(t.name);
      continue;
    }
    if (it->second->shape != t.tensor.shape()) {
      throw LoadError("parameter '" + t.name + "' has shape " + core::shape_str(t.tensor.shape()) +
                      " but the checkpoint stores " + core::shape_str(it->second->shape));
    }
    plan.emplace_back(&t, it->second);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw LoadError("checkpoint lacks " + std::to_string(missing.size()) +
                    " required parameter(s): " + names);
  }
  LoadReport report;
  for (const auto& [t, e] : plan) {
    auto handle = t->tensor;  // shares storage with the model
    auto dst = handle.values();
    std::copy(e->values.begin(), e->values.end(), dst.begin());
    report.loaded.push_back(t->name);
  }
  for (const auto& e : ck.entries)
    if (!matches(e.name, prefixes)) report.skipped.push_back(e.name);
  return report;
}

std::vector<std::string> encoder_prefixes() { return {"enc.", "bottleneck."}; }

}  // namespace spellerssl::io
