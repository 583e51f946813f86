#include "drc/jsonl.hpp"

#include <istream>
#include <sstream>

#include "drc/error.hpp"
#include "drc/text.hpp"

namespace drc::jsonl {

void read(std::istream& in, const RecordFn& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("malformed record: ") + e.what(), line_no);
    }
    if (!record.is_object()) {
      throw InputError("record is not a JSON object", line_no);
    }
    fn(record, line_no);
  }
}

void read_file(const std::filesystem::path& path, const RecordFn& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  read(in, fn);
}

std::string dump(const Json& record) {
  return record.dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

const std::string& require_string(const Json& record, std::string_view key,
                                  std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw InputError("missing field `" + std::string(key) + "`", line);
  }
  if (!it->is_string()) {
    throw InputError("field `" + std::string(key) + "` must be a string",
                     line);
  }
  return it->get_ref<const std::string&>();
}

std::optional<std::string> optional_string(const Json& record,
                                           std::string_view key,
                                           std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw InputError("field `" + std::string(key) + "` must be a string or null",
                     line);
  }
  return it->get<std::string>();
}

double require_number(const Json& record, std::string_view key,
                      std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_number()) {
    throw InputError("field `" + std::string(key) + "` must be a number", line);
  }
  return it->get<double>();
}

Writer::Writer(const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out_) throw InputError("cannot write " + path.string());
}

void Writer::write(const Json& record) { out_ << dump(record) << '\n'; }

void Writer::flush() { out_.flush(); }

}  // namespace drc::jsonl
