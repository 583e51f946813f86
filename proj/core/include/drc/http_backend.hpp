#pragma once

#include <string>
#include <string_view>

#include "drc/model_backend.hpp"

namespace drc::http {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

/// Splits an http:// URL; anything else is a ConfigError.
Endpoint parse_endpoint(std::string_view url);

/// Completions request scoring `prompt + completion` with echoed logprobs
/// and zero new tokens.
std::string build_score_request(const BackendConfig& config,
                                std::string_view prompt,
                                std::string_view completion);
std::string build_generate_request(const BackendConfig& config,
                                   std::string_view prompt,
                                   const GenerationParams& params);

/// Extracts the completion span from an echoed completions response. The
/// span is located by cumulative token text length; a token straddling the
/// prompt/completion boundary is a ProtocolError.
ScoredCompletion parse_score_response(std::string_view body,
                                      std::string_view prompt,
                                      std::string_view completion);
std::string parse_generate_response(std::string_view body);

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);

  /// Bytes: an upper bound on the server's token count.
  std::size_t count_tokens(std::string_view text) const override;

 protected:
  ScoredCompletion do_score(std::string_view prompt,
                            std::string_view completion) const override;
  std::string do_generate(std::string_view prompt,
                          const GenerationParams& params) const override;

 private:
  std::string post(const std::string& body) const;

  Endpoint endpoint_;
};

}  // namespace drc::http
