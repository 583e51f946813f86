#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drc/kto.hpp"
#include "drc/model_backend.hpp"

namespace drc {

/// Everything a run needs besides its input files. Loaded from YAML:
///
///   truncation_limit: 2048
///   kto: {beta: 0.1, lambda_desired: 1.7, lambda_undesired: 1.0, lambda_y: 1}
///   backends:
///     - id: codellama
///       kind: http
///       endpoint: http://127.0.0.1:8080/v1/completions
///       model: codellama-13b
///       max_parallel: 4
///     - id: ref
///       kind: reference
///       seed_file: seed.txt     # or seed_text
struct ToolConfig {
  std::size_t truncation_limit = 2048;
  kto::KtoConfig kto;
  std::vector<BackendConfig> backends;
};

/// `base_dir` resolves relative seed_file paths. Throws ConfigError.
ToolConfig parse_config(std::string_view yaml_text,
                        const std::filesystem::path& base_dir = {});
ToolConfig load_config(const std::filesystem::path& path);

Json to_json(const ToolConfig& config);
/// Pretty-printed effective configuration, defaults included.
std::string dump_effective_config(const ToolConfig& config);

}  // namespace drc
