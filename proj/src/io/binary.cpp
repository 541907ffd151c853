#include "spellerssl/io/binary.hpp"

#include <fstream>
#include <iterator>

#include "spellerssl/io/access_log.hpp"

namespace spellerssl::io {

std::vector<unsigned char> read_file(const std::string& path) {
  record_access(Access::kRead, path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return bytes;
}

void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
  record_access(Access::kWrite, path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error while writing '" + path + "'");
}

}  // namespace spellerssl::io
