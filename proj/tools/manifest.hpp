#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "drc/jsonl.hpp"

namespace drc::cli {

/// Provenance record written next to every command's output.
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::string tool_version;
  std::string started;
  std::string finished;
  std::string status = "ok";
  Json details = Json::object();

  void add_input(const std::filesystem::path& path);
  void finish(std::string final_status);
  Json to_json() const;
  void write(const std::filesystem::path& path) const;
};

RunManifest start_manifest(std::string command);

/// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace drc::cli
