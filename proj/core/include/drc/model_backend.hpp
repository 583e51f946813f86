#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drc/jsonl.hpp"

namespace drc {

struct TokenScore {
  std::string token_text;
  double logprob = 0.0;  // natural log, finite
};

/// Per-token scores of a completion span conditioned on a prompt.
struct ScoredCompletion {
  std::size_t prompt_token_count = 0;
  std::vector<TokenScore> completion_scores;
};

enum class BackendKind { kHttp, kReference };

std::string_view to_string(BackendKind kind) noexcept;

struct BackendConfig {
  std::string backend_id;
  BackendKind kind = BackendKind::kReference;
  std::optional<std::string> endpoint;    // http: full completions URL
  std::optional<std::string> model_name;  // http: "model" request field
  std::size_t max_parallel = 1;
  std::size_t retry_limit = 3;  // total attempts per request
  std::chrono::milliseconds timeout{60000};
  std::chrono::milliseconds backoff_base{250};
  /// Wrapped around every rendered prompt (chat template emulation).
  std::string prompt_prefix;
  std::string prompt_suffix;
  /// 0 means unlimited.
  std::size_t context_limit = 0;
  /// Environment variable holding a bearer token; defaults to DRC_API_KEY.
  std::optional<std::string> api_key_env;
  /// reference: seed text for the bigram model.
  std::optional<std::string> seed_text;
  bool context_adaptation = true;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

Json to_json(const BackendConfig& cfg);

struct GenerationParams {
  double temperature = 0.0;
  std::size_t max_tokens = 16;
};

/// A log-probability scorer and text generator. Implementations are safe to
/// call concurrently.
class Backend {
 public:
  explicit Backend(BackendConfig config) : config_(std::move(config)) {}
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const BackendConfig& config() const noexcept { return config_; }

  /// One logprob per completion token, each conditioned on the prompt and the
  /// earlier completion tokens. No sampling takes place.
  ScoredCompletion score_completion(std::string_view prompt,
                                    std::string_view completion) const;

  std::string generate(std::string_view prompt,
                       const GenerationParams& params) const;

  virtual std::size_t count_tokens(std::string_view text) const = 0;

  /// prefix + text + suffix.
  std::string wrap_prompt(std::string_view text) const;

 protected:
  virtual ScoredCompletion do_score(std::string_view prompt,
                                    std::string_view completion) const = 0;
  virtual std::string do_generate(std::string_view prompt,
                                  const GenerationParams& params) const = 0;

 private:
  BackendConfig config_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

/// Config for the offline byte-bigram backend.
BackendConfig build_reference_backend(std::string seed_text,
                                      std::string backend_id = "reference");

ScoredCompletion score_completion(const BackendConfig& config,
                                  std::string_view prompt,
                                  std::string_view completion);
std::string generate(const BackendConfig& config, std::string_view prompt,
                     const GenerationParams& params);

}  // namespace drc
