#include "spellerssl/io/access_log.hpp"

#include <mutex>

namespace spellerssl::io {

namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

std::vector<AccessRecord>& log_storage() {
  static std::vector<AccessRecord> records;
  return records;
}

}  // namespace

void record_access(Access kind, const std::string& path) {
  std::lock_guard lock(log_mutex());
  log_storage().push_back({kind, path});
}

std::vector<AccessRecord> access_log() {
  std::lock_guard lock(log_mutex());
  return log_storage();
}

std::vector<std::string> paths_read() {
  std::lock_guard lock(log_mutex());
  std::vector<std::string> out;
  for (const auto& r : log_storage())
    if (r.kind == Access::kRead) out.push_back(r.path);
  return out;
}

void clear_access_log() {
  std::lock_guard lock(log_mutex());
  log_storage().clear();
}

}  // namespace spellerssl::io
