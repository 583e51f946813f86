#include "drc/model_backend.hpp"

#include <cmath>

#include "drc/error.hpp"
#include "drc/http_backend.hpp"
#include "drc/reference_model.hpp"
#include "drc/text.hpp"

namespace drc {
namespace {

class ReferenceBackend final : public Backend {
 public:
  explicit ReferenceBackend(BackendConfig config)
      : Backend(std::move(config)), model_(*this->config().seed_text) {}

  std::size_t count_tokens(std::string_view text) const override {
    return text.size();
  }

 protected:
  ScoredCompletion do_score(std::string_view prompt,
                            std::string_view completion) const override {
    ScoredCompletion out;
    out.prompt_token_count = prompt.size();
    const auto logprobs = model_.completion_logprobs(
        prompt, completion, config().context_adaptation);
    out.completion_scores.reserve(logprobs.size());
    for (std::size_t i = 0; i < logprobs.size(); ++i) {
      out.completion_scores.push_back({std::string(1, completion[i]), logprobs[i]});
    }
    return out;
  }

  std::string do_generate(std::string_view prompt,
                          const GenerationParams& params) const override {
    return model_.generate(prompt, params.max_tokens,
                           config().context_adaptation);
  }

 private:
  BigramModel model_;
};

}  // namespace

std::string_view to_string(BackendKind kind) noexcept {
  return kind == BackendKind::kHttp ? "http" : "reference";
}

void BackendConfig::validate() const {
  if (backend_id.empty()) throw ConfigError("backend id must not be empty");
  if (max_parallel < 1) {
    throw ConfigError("backend " + backend_id + ": max_parallel must be >= 1");
  }
  if (kind == BackendKind::kHttp) {
    if (!endpoint || endpoint->empty()) {
      throw ConfigError("backend " + backend_id + ": http backend needs an endpoint");
    }
    http::parse_endpoint(*endpoint);
  } else {
    if (!seed_text) {
      throw ConfigError("backend " + backend_id + ": reference backend needs seed text");
    }
    if (seed_text->size() < 2) {
      throw ConfigError("backend " + backend_id + ": seed text needs at least 2 bytes");
    }
  }
}

Json to_json(const BackendConfig& cfg) {
  Json j;
  j["id"] = cfg.backend_id;
  j["kind"] = to_string(cfg.kind);
  if (cfg.endpoint) j["endpoint"] = *cfg.endpoint;
  if (cfg.model_name) j["model"] = *cfg.model_name;
  j["max_parallel"] = cfg.max_parallel;
  j["retry_limit"] = cfg.retry_limit;
  j["timeout_ms"] = cfg.timeout.count();
  j["backoff_base_ms"] = cfg.backoff_base.count();
  j["prompt_prefix"] = cfg.prompt_prefix;
  j["prompt_suffix"] = cfg.prompt_suffix;
  j["context_limit"] = cfg.context_limit;
  if (cfg.api_key_env) j["api_key_env"] = *cfg.api_key_env;
  if (cfg.seed_text) j["seed_bytes"] = cfg.seed_text->size();
  if (cfg.kind == BackendKind::kReference) {
    j["context_adaptation"] = cfg.context_adaptation;
  }
  return j;
}

ScoredCompletion Backend::score_completion(std::string_view prompt,
                                           std::string_view completion) const {
  if (text::is_blank(completion)) {
    throw PreconditionError("completion must be non-empty");
  }
  if (config_.context_limit > 0) {
    const std::size_t p = count_tokens(prompt);
    const std::size_t c = count_tokens(completion);
    if (p + c > config_.context_limit) {
      throw OverflowError("backend " + config_.backend_id + ": prompt " +
                          std::to_string(p) + " + completion " +
                          std::to_string(c) + " tokens exceed context limit " +
                          std::to_string(config_.context_limit));
    }
  }
  return do_score(prompt, completion);
}

std::string Backend::generate(std::string_view prompt,
                              const GenerationParams& params) const {
  if (prompt.empty()) throw PreconditionError("prompt must be non-empty");
  if (params.max_tokens == 0) return {};
  return do_generate(prompt, params);
}

std::string Backend::wrap_prompt(std::string_view text) const {
  std::string out = config_.prompt_prefix;
  out += text;
  out += config_.prompt_suffix;
  return out;
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::kHttp) {
    return std::make_unique<http::HttpBackend>(config);
  }
  return std::make_unique<ReferenceBackend>(config);
}

BackendConfig build_reference_backend(std::string seed_text,
                                      std::string backend_id) {
  if (seed_text.size() < 2) {
    throw PreconditionError("reference seed needs at least 2 bytes");
  }
  BackendConfig cfg;
  cfg.backend_id = std::move(backend_id);
  cfg.kind = BackendKind::kReference;
  cfg.seed_text = std::move(seed_text);
  return cfg;
}

ScoredCompletion score_completion(const BackendConfig& config,
                                  std::string_view prompt,
                                  std::string_view completion) {
  return make_backend(config)->score_completion(prompt, completion);
}

std::string generate(const BackendConfig& config, std::string_view prompt,
                     const GenerationParams& params) {
  return make_backend(config)->generate(prompt, params);
}

}  // namespace drc
