#include "drc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "drc/error.hpp"
#include "drc/jsonl.hpp"

namespace drc {
namespace {

void reject_unknown(const YAML::Node& node, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto k : known) ok = ok || k == key;
    if (!ok) {
      throw ConfigError("unknown key `" + key + "` in " + std::string(where));
    }
  }
}

template <typename T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad value for `") + key + "`: " + e.what());
  }
}

std::size_t get_count(const YAML::Node& node, const char* key, std::size_t fallback) {
  const long long v = get_or<long long>(node, key, static_cast<long long>(fallback));
  if (v < 0) throw ConfigError(std::string("`") + key + "` must be >= 0");
  return static_cast<std::size_t>(v);
}

BackendConfig parse_backend(const YAML::Node& node,
                            const std::filesystem::path& base_dir) {
  if (!node.IsMap()) throw ConfigError("each backend must be a mapping");
  reject_unknown(node,
                 {"id", "kind", "endpoint", "model", "max_parallel", "retry_limit",
                  "timeout_ms", "backoff_base_ms", "prompt_prefix", "prompt_suffix",
                  "context_limit", "api_key_env", "seed_text", "seed_file",
                  "context_adaptation"},
                 "backend");
  BackendConfig b;
  b.backend_id = get_or<std::string>(node, "id", "");
  const auto kind = get_or<std::string>(node, "kind", "");
  if (kind == "http") {
    b.kind = BackendKind::kHttp;
  } else if (kind == "reference") {
    b.kind = BackendKind::kReference;
  } else {
    throw ConfigError("backend `" + b.backend_id + "`: kind must be http or reference");
  }
  if (node["endpoint"]) b.endpoint = get_or<std::string>(node, "endpoint", "");
  if (node["model"]) b.model_name = get_or<std::string>(node, "model", "");
  b.max_parallel = get_count(node, "max_parallel", b.max_parallel);
  b.retry_limit = get_count(node, "retry_limit", b.retry_limit);
  b.timeout = std::chrono::milliseconds(
      get_count(node, "timeout_ms", static_cast<std::size_t>(b.timeout.count())));
  b.backoff_base = std::chrono::milliseconds(get_count(
      node, "backoff_base_ms", static_cast<std::size_t>(b.backoff_base.count())));
  b.prompt_prefix = get_or<std::string>(node, "prompt_prefix", "");
  b.prompt_suffix = get_or<std::string>(node, "prompt_suffix", "");
  b.context_limit = get_count(node, "context_limit", 0);
  if (node["api_key_env"]) b.api_key_env = get_or<std::string>(node, "api_key_env", "");
  b.context_adaptation = get_or<bool>(node, "context_adaptation", true);
  if (node["seed_text"] && node["seed_file"]) {
    throw ConfigError("backend `" + b.backend_id + "`: give seed_text or seed_file, not both");
  }
  if (node["seed_text"]) b.seed_text = get_or<std::string>(node, "seed_text", "");
  if (node["seed_file"]) {
    std::filesystem::path p = get_or<std::string>(node, "seed_file", "");
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read seed_file " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    b.seed_text = ss.str();
  }
  b.validate();
  return b;
}

}  // namespace

ToolConfig parse_config(std::string_view yaml_text,
                        const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  ToolConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  reject_unknown(root, {"truncation_limit", "kto", "backends"}, "config");

  cfg.truncation_limit = get_count(root, "truncation_limit", cfg.truncation_limit);
  if (cfg.truncation_limit == 0) throw ConfigError("truncation_limit must be > 0");

  if (const auto kto = root["kto"]) {
    if (!kto.IsMap()) throw ConfigError("`kto` must be a mapping");
    reject_unknown(kto, {"beta", "lambda_desired", "lambda_undesired", "lambda_y"}, "kto");
    cfg.kto.beta = get_or<double>(kto, "beta", cfg.kto.beta);
    cfg.kto.lambda_desired = get_or<double>(kto, "lambda_desired", cfg.kto.lambda_desired);
    cfg.kto.lambda_undesired =
        get_or<double>(kto, "lambda_undesired", cfg.kto.lambda_undesired);
    cfg.kto.lambda_y = get_or<double>(kto, "lambda_y", cfg.kto.lambda_y);
  }
  cfg.kto.validate();

  if (const auto backends = root["backends"]) {
    if (!backends.IsSequence()) throw ConfigError("`backends` must be a list");
    std::set<std::string> ids;
    for (const auto& node : backends) {
      auto b = parse_backend(node, base_dir);
      if (!ids.insert(b.backend_id).second) {
        throw ConfigError("duplicate backend id `" + b.backend_id + "`");
      }
      cfg.backends.push_back(std::move(b));
    }
  }
  return cfg;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

Json to_json(const ToolConfig& config) {
  Json j;
  j["truncation_limit"] = config.truncation_limit;
  Json kto;
  kto["beta"] = config.kto.beta;
  kto["lambda_desired"] = config.kto.lambda_desired;
  kto["lambda_undesired"] = config.kto.lambda_undesired;
  kto["lambda_y"] = config.kto.lambda_y;
  j["kto"] = std::move(kto);
  Json backends = Json::array();
  for (const auto& b : config.backends) backends.push_back(to_json(b));
  j["backends"] = std::move(backends);
  return j;
}

std::string dump_effective_config(const ToolConfig& config) {
  return to_json(config).dump(2) + "\n";
}

}  // namespace drc
