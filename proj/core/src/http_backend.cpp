#include "drc/http_backend.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <regex>
#include <thread>

#include "drc/error.hpp"
#include "httplib.h"

namespace drc::http {
namespace {

constexpr double kLogprobTolerance = 1e-6;

std::string next_request_id() {
  static std::atomic<std::uint64_t> counter{0};
  return "drc-" + std::to_string(counter.fetch_add(1) + 1);
}

std::chrono::milliseconds backoff_delay(std::chrono::milliseconds base,
                                        std::size_t attempt) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const auto scaled = base.count() << std::min<std::size_t>(attempt, 16);
  std::uniform_int_distribution<long long> jitter(0, std::max<long long>(
                                                         base.count(), 1));
  return std::chrono::milliseconds(scaled + jitter(rng));
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

Json parse_body(std::string_view body) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
}

const Json& first_choice(const Json& response) {
  auto choices = response.find("choices");
  if (choices == response.end() || !choices->is_array() || choices->empty() ||
      !(*choices)[0].is_object()) {
    throw ProtocolError("response has no choices");
  }
  return (*choices)[0];
}

}  // namespace

Endpoint parse_endpoint(std::string_view url) {
  static const std::regex kUrl(R"(^(http://[^/\s]+)(/\S*)?$)");
  std::cmatch m;
  if (!std::regex_match(url.begin(), url.end(), m, kUrl)) {
    throw ConfigError("unsupported endpoint URL `" + std::string(url) +
                      "` (expected http://host[:port]/path)");
  }
  Endpoint e;
  e.origin = m[1].str();
  e.path = m[2].matched ? m[2].str() : "/v1/completions";
  return e;
}

std::string build_score_request(const BackendConfig& config,
                                std::string_view prompt,
                                std::string_view completion) {
  Json req;
  if (config.model_name) req["model"] = *config.model_name;
  req["prompt"] = std::string(prompt) + std::string(completion);
  req["max_tokens"] = 0;
  req["echo"] = true;
  req["logprobs"] = 1;
  req["temperature"] = 0.0;
  return jsonl::dump(req);
}

std::string build_generate_request(const BackendConfig& config,
                                   std::string_view prompt,
                                   const GenerationParams& params) {
  Json req;
  if (config.model_name) req["model"] = *config.model_name;
  req["prompt"] = std::string(prompt);
  req["max_tokens"] = params.max_tokens;
  req["temperature"] = params.temperature;
  return jsonl::dump(req);
}

ScoredCompletion parse_score_response(std::string_view body,
                                      std::string_view prompt,
                                      std::string_view completion) {
  const Json response = parse_body(body);
  const Json& choice = first_choice(response);
  auto lp = choice.find("logprobs");
  if (lp == choice.end() || !lp->is_object()) {
    throw ProtocolError("response missing logprobs");
  }
  auto tokens = lp->find("tokens");
  auto values = lp->find("token_logprobs");
  if (tokens == lp->end() || values == lp->end() || !tokens->is_array() ||
      !values->is_array()) {
    throw ProtocolError("response missing tokens/token_logprobs");
  }
  if (tokens->size() != values->size()) {
    throw ProtocolError("tokens and token_logprobs differ in length (" +
                        std::to_string(tokens->size()) + " vs " +
                        std::to_string(values->size()) + ")");
  }

  const std::size_t boundary = prompt.size();
  const std::size_t end = prompt.size() + completion.size();
  ScoredCompletion out;
  std::string span;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < tokens->size() && pos < end; ++i) {
    if (!(*tokens)[i].is_string()) {
      throw ProtocolError("token " + std::to_string(i) + " is not a string");
    }
    const auto& tok = (*tokens)[i].get_ref<const std::string&>();
    const std::size_t start = pos;
    pos += tok.size();
    if (start < boundary && pos > boundary) {
      throw ProtocolError("token " + std::to_string(i) + " straddles the " +
                          "prompt/completion boundary at byte " +
                          std::to_string(boundary));
    }
    if (start < end && pos > end) {
      throw ProtocolError("token " + std::to_string(i) +
                          " runs past the end of the completion");
    }
    if (pos <= boundary) {
      ++out.prompt_token_count;
      continue;
    }
    if (tok.empty()) continue;
    const Json& v = (*values)[i];
    if (!v.is_number()) {
      throw ProtocolError("missing logprob for completion token " +
                          std::to_string(i));
    }
    const double logprob = v.get<double>();
    if (!std::isfinite(logprob) || logprob > kLogprobTolerance) {
      throw ProtocolError("invalid logprob for completion token " +
                          std::to_string(i));
    }
    span += tok;
    out.completion_scores.push_back({tok, logprob});
  }
  if (pos < end) {
    throw ProtocolError("echoed tokens cover " + std::to_string(pos) +
                        " bytes, expected at least " + std::to_string(end));
  }
  if (span != completion) {
    throw ProtocolError("echoed completion text does not match the request");
  }
  return out;
}

std::string parse_generate_response(std::string_view body) {
  const Json response = parse_body(body);
  const Json& choice = first_choice(response);
  auto text = choice.find("text");
  if (text == choice.end() || !text->is_string()) {
    throw ProtocolError("response choice has no text");
  }
  return text->get<std::string>();
}

HttpBackend::HttpBackend(BackendConfig config)
    : Backend(std::move(config)), endpoint_(parse_endpoint(*this->config().endpoint)) {}

std::size_t HttpBackend::count_tokens(std::string_view text) const {
  return text.size();
}

ScoredCompletion HttpBackend::do_score(std::string_view prompt,
                                       std::string_view completion) const {
  return parse_score_response(
      post(build_score_request(config(), prompt, completion)), prompt,
      completion);
}

std::string HttpBackend::do_generate(std::string_view prompt,
                                     const GenerationParams& params) const {
  return parse_generate_response(
      post(build_generate_request(config(), prompt, params)));
}

std::string HttpBackend::post(const std::string& body) const {
  const auto& cfg = config();
  const std::string request_id = next_request_id();
  httplib::Headers headers{{"X-Request-Id", request_id}};
  const char* key_var =
      cfg.api_key_env ? cfg.api_key_env->c_str() : "DRC_API_KEY";
  if (const char* key = std::getenv(key_var); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const std::size_t attempts = std::max<std::size_t>(cfg.retry_limit, 1);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      cfg.timeout - secs);
  std::string last_failure;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff_delay(cfg.backoff_base, attempt - 1));
    }
    httplib::Client client(endpoint_.origin);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto res = client.Post(endpoint_.path, headers, body, "application/json");
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError("backend " + cfg.backend_id + " answered HTTP " +
                          std::to_string(res->status) + ": " + res->body);
    }
    if (res->has_header("X-Request-Id") &&
        res->get_header_value("X-Request-Id") != request_id) {
      throw ProtocolError("response request id `" +
                          res->get_header_value("X-Request-Id") +
                          "` does not match `" + request_id + "`");
    }
    return res->body;
  }
  throw TransportError("backend " + cfg.backend_id + " at " + endpoint_.origin +
                       " failed after " + std::to_string(attempts) +
                       " attempt(s): " + last_failure);
}

}  // namespace drc::http
