#include "drc/corpus.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "drc/error.hpp"
#include "drc/text.hpp"

namespace drc {
namespace {

constexpr std::array<std::string_view, 6> kEntryFields = {
    "entry_id", "language", "old_hunk", "comment", "new_hunk", "human_label"};

bool is_entry_field(std::string_view key) {
  for (auto f : kEntryFields) {
    if (f == key) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::kDesired ? "desired" : "undesired";
}

std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "desired") return Label::kDesired;
  if (s == "undesired") return Label::kUndesired;
  return std::nullopt;
}

std::string_view to_string(SplitTag tag) noexcept {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kTest: return "test";
    case SplitTag::kOther: return "other";
  }
  return "other";
}

SplitTag parse_split_tag(std::string_view s) {
  if (s == "train") return SplitTag::kTrain;
  if (s == "test") return SplitTag::kTest;
  if (s == "other") return SplitTag::kOther;
  throw InputError("unknown split tag `" + std::string(s) + "`");
}

bool ReviewEntry::scorable() const noexcept {
  return new_hunk.has_value() && !text::is_blank(*new_hunk);
}

Json to_json(const ReviewEntry& entry) {
  Json j;
  j["entry_id"] = entry.entry_id;
  j["language"] = entry.language;
  j["old_hunk"] = entry.old_hunk;
  j["comment"] = entry.comment;
  j["new_hunk"] = entry.new_hunk ? Json(*entry.new_hunk) : Json(nullptr);
  j["human_label"] =
      entry.human_label ? Json(to_string(*entry.human_label)) : Json(nullptr);
  return j;
}

ReviewEntry entry_from_json(const Json& record, std::size_t line) {
  for (const auto& [key, value] : record.items()) {
    if (!is_entry_field(key)) {
      throw InputError("unknown field `" + key + "`", line);
    }
  }
  ReviewEntry e;
  e.entry_id = jsonl::require_string(record, "entry_id", line);
  e.language = jsonl::require_string(record, "language", line);
  e.old_hunk = jsonl::require_string(record, "old_hunk", line);
  e.comment = jsonl::require_string(record, "comment", line);
  e.new_hunk = jsonl::optional_string(record, "new_hunk", line);
  if (auto label = jsonl::optional_string(record, "human_label", line)) {
    e.human_label = parse_label(*label);
    if (!e.human_label) {
      throw InputError("invalid human_label `" + *label + "`", line);
    }
  }
  if (e.entry_id.empty()) throw InputError("empty entry_id", line);
  if (text::is_blank(e.old_hunk)) throw InputError("blank old_hunk", line);
  if (text::is_blank(e.comment)) throw InputError("blank comment", line);
  return e;
}

Corpus::Corpus(std::vector<ReviewEntry> entries, std::string source_path,
               SplitTag split_tag)
    : entries_(std::move(entries)),
      source_path_(std::move(source_path)),
      split_tag_(split_tag) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].entry_id, i).second) {
      throw InputError("duplicate entry_id `" + entries_[i].entry_id + "`");
    }
  }
}

const ReviewEntry* Corpus::find(std::string_view entry_id) const {
  auto idx = index_of(entry_id);
  return idx ? &entries_[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::index_of(std::string_view entry_id) const {
  auto it = index_.find(std::string(entry_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Corpus parse_corpus(std::istream& in, std::string source_path,
                    SplitTag split_tag) {
  std::vector<ReviewEntry> entries;
  std::unordered_map<std::string, std::size_t> seen;
  jsonl::read(in, [&](const Json& record, std::size_t line) {
    ReviewEntry e = entry_from_json(record, line);
    auto [it, inserted] = seen.emplace(e.entry_id, line);
    if (!inserted) {
      throw InputError("duplicate entry_id `" + e.entry_id +
                           "` (first seen on line " +
                           std::to_string(it->second) + ")",
                       line);
    }
    entries.push_back(std::move(e));
  });
  if (entries.empty()) {
    throw InputError("corpus " + source_path + " contains no records");
  }
  return Corpus(std::move(entries), std::move(source_path), split_tag);
}

Corpus load_corpus(const std::filesystem::path& path, SplitTag split_tag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus " + path.string());
  return parse_corpus(in, path.string(), split_tag);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& e : corpus.entries()) {
    out += jsonl::dump(to_json(e));
    out += '\n';
  }
  return out;
}

Annotations parse_annotations(std::istream& in) {
  Annotations out;
  jsonl::read(in, [&](const Json& record, std::size_t line) {
    const auto& id = jsonl::require_string(record, "entry_id", line);
    const auto& raw = jsonl::require_string(record, "label", line);
    auto label = parse_label(raw);
    if (!label) throw InputError("unknown label `" + raw + "`", line);
    auto [it, inserted] = out.emplace(id, *label);
    if (!inserted && it->second != *label) {
      throw InputError("conflicting labels for `" + id + "`", line);
    }
  });
  return out;
}

Annotations load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open annotations " + path.string());
  return parse_annotations(in);
}

std::size_t count_bytes(std::string_view text) noexcept { return text.size(); }

TruncatedText truncate_tokens(std::string_view text, std::size_t limit,
                              const TokenCounter& counter) {
  if (limit == 0) throw PreconditionError("truncation limit must be > 0");
  if (text.empty() || counter(text) <= limit) return {std::string(text), false};
  auto cuts = text::code_point_boundaries(text);
  // Largest cut index whose prefix fits; cuts[0] == 0 always fits.
  std::size_t lo = 0, hi = cuts.size() - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo + 1) / 2;
    if (counter(text.substr(0, cuts[mid])) <= limit) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return {std::string(text.substr(0, cuts[lo])), true};
}

TruncatedText truncate_tokens_left(std::string_view text, std::size_t limit,
                                   const TokenCounter& counter) {
  if (text.empty() || counter(text) <= limit) return {std::string(text), false};
  auto cuts = text::code_point_boundaries(text);
  // Smallest start index whose suffix fits; the last cut (empty) always fits.
  std::size_t lo = 0, hi = cuts.size() - 1;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (counter(text.substr(cuts[mid])) <= limit) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {std::string(text.substr(cuts[lo])), true};
}

}  // namespace drc
