#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "drc/corpus.hpp"

namespace drc::testing {

inline constexpr std::string_view kSeed =
    "def add(a, b):\n    return a + b\n\nfor i in range(10):\n    print(i)\n";

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);
std::filesystem::path data_path(std::string_view relative);

ReviewEntry make_entry(std::string id, std::string old_hunk, std::string comment,
                       std::optional<std::string> new_hunk,
                       std::optional<Label> label = std::nullopt);

/// Three comments that spell out their fix and three unrelated ones. Entries
/// p1..p3 are desired by construction, u1..u3 undesired.
std::vector<ReviewEntry> predictive_fixture();

/// n entries cycling through predictive/unrelated patterns with varying
/// constants; every 10th entry has no recorded fix. Human labels follow the
/// pattern (predictive = desired).
std::vector<ReviewEntry> synthetic_corpus(std::size_t n);

std::string corpus_jsonl(const std::vector<ReviewEntry>& entries);

/// Config YAML with one reference backend seeded from `seed_path`.
std::string reference_config_yaml(const std::filesystem::path& seed_path,
                                  std::string_view backend_id = "ref");

}  // namespace drc::testing
