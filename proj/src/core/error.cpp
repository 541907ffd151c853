#include "spellerssl/core/error.hpp"

namespace spellerssl {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kDataIntegrity: return "data-integrity error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kLoad: return "load error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kLabel: return "label error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kStatistics: return "statistics error";
    case ErrorKind::kLookup: return "lookup error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kCollation: return "collation error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace spellerssl
