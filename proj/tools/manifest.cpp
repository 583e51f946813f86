#include "manifest.hpp"

#include <chrono>
#include <ctime>

#include "drc/digest.hpp"
#include "drc/version.hpp"

namespace drc::cli {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest start_manifest(std::string command) {
  RunManifest m;
  m.command = std::move(command);
  m.tool_version = kToolVersion;
  m.started = utc_timestamp();
  return m;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  input_digests[path.string()] = sha256_file_hex(path);
}

void RunManifest::finish(std::string final_status) {
  status = std::move(final_status);
  finished = utc_timestamp();
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["tool_version"] = tool_version;
  j["config_digest"] = config_digest;
  Json inputs = Json::object();
  for (const auto& [path, digest] : input_digests) inputs[path] = digest;
  j["input_digests"] = std::move(inputs);
  j["started"] = started;
  j["finished"] = finished;
  j["status"] = status;
  j["details"] = details;
  return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
  jsonl::write_text_file(path, to_json().dump(2) + "\n");
}

}  // namespace drc::cli
