#pragma once

#include <string>
#include <vector>

namespace spellerssl::io {

// Process-wide record of every file the io layer opened. Tests use it to
// check that a command only touched the inputs it should.
enum class Access { kRead, kWrite };

struct AccessRecord {
  Access kind;
  std::string path;
};

void record_access(Access kind, const std::string& path);
std::vector<AccessRecord> access_log();
std::vector<std::string> paths_read();
void clear_access_log();

}  // namespace spellerssl::io
