#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace drc {

/// Failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
  kInput,         // malformed or inconsistent input files
  kConfig,        // bad configuration
  kPrecondition,  // caller violated an operation contract
  kTransport,     // network failure after retries
  kProtocol,      // backend answered with something we cannot use
  kOverflow,      // text does not fit the context window
  kUnscorable,    // entry lacks what scoring needs (no fix)
  kJudgeParse,    // LLM judge output outside the True/False contract
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message,
                      std::optional<std::size_t> line = std::nullopt);
  /// 1-based line number of the offending record, when known.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::optional<std::size_t> line_;
};

#define DRC_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(Kind, message) {} \
  }

DRC_DEFINE_ERROR(ConfigError, ErrorKind::kConfig);
DRC_DEFINE_ERROR(PreconditionError, ErrorKind::kPrecondition);
DRC_DEFINE_ERROR(TransportError, ErrorKind::kTransport);
DRC_DEFINE_ERROR(ProtocolError, ErrorKind::kProtocol);
DRC_DEFINE_ERROR(OverflowError, ErrorKind::kOverflow);
DRC_DEFINE_ERROR(UnscorableError, ErrorKind::kUnscorable);
DRC_DEFINE_ERROR(JudgeParseError, ErrorKind::kJudgeParse);

#undef DRC_DEFINE_ERROR

/// Rethrows `error` as the same concrete type with `context: ` prepended.
[[noreturn]] void rethrow_with_context(const Error& error,
                                       std::string_view context);

}  // namespace drc
