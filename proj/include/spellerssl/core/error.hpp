#pragma once

#include <stdexcept>
#include <string>

namespace spellerssl {

// Every failure raised by the library carries a kind so the CLI can map it
// onto an exit code without string matching.
enum class ErrorKind {
  kDimension,
  kConfiguration,
  kDataIntegrity,
  kFormat,
  kLoad,
  kRange,
  kLabel,
  kState,
  kNumeric,
  kStatistics,
  kLookup,
  kIo,
  kCollation,
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SPELLERSSL_DEFINE_ERROR(Name, Kind)                               \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(Kind, message) {}   \
  }

SPELLERSSL_DEFINE_ERROR(DimensionError, ErrorKind::kDimension);
SPELLERSSL_DEFINE_ERROR(ConfigError, ErrorKind::kConfiguration);
SPELLERSSL_DEFINE_ERROR(DataIntegrityError, ErrorKind::kDataIntegrity);
SPELLERSSL_DEFINE_ERROR(FormatError, ErrorKind::kFormat);
SPELLERSSL_DEFINE_ERROR(LoadError, ErrorKind::kLoad);
SPELLERSSL_DEFINE_ERROR(RangeError, ErrorKind::kRange);
SPELLERSSL_DEFINE_ERROR(LabelError, ErrorKind::kLabel);
SPELLERSSL_DEFINE_ERROR(StateError, ErrorKind::kState);
SPELLERSSL_DEFINE_ERROR(NumericError, ErrorKind::kNumeric);
SPELLERSSL_DEFINE_ERROR(StatisticsError, ErrorKind::kStatistics);
SPELLERSSL_DEFINE_ERROR(LookupError, ErrorKind::kLookup);
SPELLERSSL_DEFINE_ERROR(IoError, ErrorKind::kIo);
SPELLERSSL_DEFINE_ERROR(CollationError, ErrorKind::kCollation);

#undef SPELLERSSL_DEFINE_ERROR

}  // namespace spellerssl
