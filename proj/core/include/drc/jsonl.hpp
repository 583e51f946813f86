#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace drc {

/// Insertion-ordered JSON so that emitted records have a fixed field order.
using Json = nlohmann::ordered_json;

namespace jsonl {

using RecordFn = std::function<void(const Json& record, std::size_t line)>;

/// Parses one JSON object per non-blank line. Parse failures (including
/// ill-formed UTF-8) raise InputError carrying the 1-based line number.
void read(std::istream& in, const RecordFn& fn);
void read_file(const std::filesystem::path& path, const RecordFn& fn);

/// Compact single-line serialization, UTF-8 passed through unescaped.
std::string dump(const Json& record);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a sibling temp file and rename.
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

const std::string& require_string(const Json& record, std::string_view key,
                                  std::size_t line);
std::optional<std::string> optional_string(const Json& record,
                                           std::string_view key,
                                           std::size_t line);
double require_number(const Json& record, std::string_view key,
                      std::size_t line);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path, bool append = false);
  void write(const Json& record);
  void flush();

 private:
  std::ofstream out_;
};

}  // namespace jsonl
}  // namespace drc
