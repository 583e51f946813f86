#include "drc/error.hpp"

namespace drc {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInput: return "input";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kProtocol: return "protocol";
    case ErrorKind::kOverflow: return "overflow";
    case ErrorKind::kUnscorable: return "unscorable";
    case ErrorKind::kJudgeParse: return "judge-parse";
  }
  return "unknown";
}

InputError::InputError(const std::string& message,
                       std::optional<std::size_t> line)
    : Error(ErrorKind::kInput,
            line ? "line " + std::to_string(*line) + ": " + message : message),
      line_(line) {}

void rethrow_with_context(const Error& error, std::string_view context) {
  std::string message = std::string(context) + ": " + error.what();
  switch (error.kind()) {
    case ErrorKind::kInput: throw InputError(message);
    case ErrorKind::kConfig: throw ConfigError(message);
    case ErrorKind::kPrecondition: throw PreconditionError(message);
    case ErrorKind::kTransport: throw TransportError(message);
    case ErrorKind::kProtocol: throw ProtocolError(message);
    case ErrorKind::kOverflow: throw OverflowError(message);
    case ErrorKind::kUnscorable: throw UnscorableError(message);
    case ErrorKind::kJudgeParse: throw JudgeParseError(message);
  }
  throw Error(error.kind(), message);
}

}  // namespace drc
