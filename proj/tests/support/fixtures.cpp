#include "support/fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace drc::testing {

TempDir::TempDir() {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("drc-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path data_path(std::string_view relative) {
  return std::filesystem::path(DRC_TEST_DATA_DIR) / relative;
}

ReviewEntry make_entry(std::string id, std::string old_hunk, std::string comment,
                       std::optional<std::string> new_hunk, std::optional<Label> label) {
  ReviewEntry e;
  e.entry_id = std::move(id);
  e.language = "py";
  e.old_hunk = std::move(old_hunk);
  e.comment = std::move(comment);
  e.new_hunk = std::move(new_hunk);
  e.human_label = label;
  return e;
}

std::vector<ReviewEntry> predictive_fixture() {
  return {
      make_entry("p1", "x = 41\n", "set x to 42", "x = 42\n", Label::kDesired),
      make_entry("p2", "buf[i+1] = 0\n", "use buf[i] here, i+1 overflows",
                 "buf[i] = 0\n", Label::kDesired),
      make_entry("p3", "y = x*2\n", "prefer x<<1 over x*2", "y = x<<1\n",
                 Label::kDesired),
      make_entry("u1", "z = 7\n", "please add more unit tests", "z = 8\n",
                 Label::kUndesired),
      make_entry("u2", "q = q+1\n", "typo in the docs", "q += 1\n", Label::kUndesired),
      make_entry("u3", "k = [0]*9\n", "nice work", "k = [0]*16\n", Label::kUndesired),
  };
}

std::vector<ReviewEntry> synthetic_corpus(std::size_t n) {
  static const char* kUnrelated[] = {"please add more unit tests", "typo in the docs",
                                     "nice work", "can we rename this file later?"};
  std::vector<ReviewEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "e%03zu", i);
    const std::string var(1, static_cast<char>('a' + i % 26));
    const std::string before = var + " = " + std::to_string(i) + "\n";
    const std::string after = var + " = " + std::to_string(i + 100) + "\n";
    const bool predictive = i % 2 == 0;
    std::optional<std::string> fix = after;
    if (i % 10 == 9) fix.reset();
    out.push_back(make_entry(
        id, before,
        predictive ? "set " + var + " to " + std::to_string(i + 100)
                   : std::string(kUnrelated[i % 4]),
        fix, predictive ? Label::kDesired : Label::kUndesired));
  }
  return out;
}

std::string corpus_jsonl(const std::vector<ReviewEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += jsonl::dump(to_json(e));
    out += '\n';
  }
  return out;
}

std::string reference_config_yaml(const std::filesystem::path& seed_path,
                                  std::string_view backend_id) {
  std::ostringstream ss;
  ss << "truncation_limit: 2048\n"
     << "backends:\n"
     << "  - id: " << backend_id << "\n"
     << "    kind: reference\n"
     << "    seed_file: " << seed_path.string() << "\n"
     << "    max_parallel: 2\n";
  return ss.str();
}

}  // namespace drc::testing
