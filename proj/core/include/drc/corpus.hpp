#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "drc/jsonl.hpp"

namespace drc {

enum class Label { kDesired, kUndesired };

std::string_view to_string(Label label) noexcept;
/// Accepts exactly "desired" or "undesired".
std::optional<Label> parse_label(std::string_view s) noexcept;

enum class SplitTag { kTrain, kTest, kOther };

std::string_view to_string(SplitTag tag) noexcept;
SplitTag parse_split_tag(std::string_view s);

/// One code-review record: the hunk under review, the reviewer's comment and
/// (when recorded) the code after the fix.
struct ReviewEntry {
  std::string entry_id;
  std::string language;
  std::string old_hunk;
  std::string comment;
  std::optional<std::string> new_hunk;
  std::optional<Label> human_label;

  /// Scoring needs the post-review code.
  bool scorable() const noexcept;

  friend bool operator==(const ReviewEntry&, const ReviewEntry&) = default;
};

Json to_json(const ReviewEntry& entry);
/// Validates field set and invariants; `line` is used for error messages.
ReviewEntry entry_from_json(const Json& record, std::size_t line);

class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<ReviewEntry> entries, std::string source_path,
         SplitTag split_tag);

  const std::vector<ReviewEntry>& entries() const noexcept { return entries_; }
  const std::string& source_path() const noexcept { return source_path_; }
  SplitTag split_tag() const noexcept { return split_tag_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const ReviewEntry* find(std::string_view entry_id) const;
  std::optional<std::size_t> index_of(std::string_view entry_id) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.entries_ == b.entries_ && a.source_path_ == b.source_path_ &&
           a.split_tag_ == b.split_tag_;
  }

 private:
  std::vector<ReviewEntry> entries_;
  std::string source_path_;
  SplitTag split_tag_ = SplitTag::kOther;
  std::unordered_map<std::string, std::size_t> index_;
};

Corpus parse_corpus(std::istream& in, std::string source_path,
                    SplitTag split_tag);
Corpus load_corpus(const std::filesystem::path& path, SplitTag split_tag);

/// Canonical line-delimited form: fixed field order, one record per line.
std::string serialize_corpus(const Corpus& corpus);

/// Manual annotations, ordered by entry id.
using Annotations = std::map<std::string, Label, std::less<>>;

Annotations parse_annotations(std::istream& in);
Annotations load_annotations(const std::filesystem::path& path);

/// Counts tokens of a text under some backend's tokenizer.
using TokenCounter = std::function<std::size_t(std::string_view)>;

std::size_t count_bytes(std::string_view text) noexcept;

struct TruncatedText {
  std::string text;
  bool truncated = false;
};

/// Longest prefix (cut on a code point boundary) that counts to <= limit.
TruncatedText truncate_tokens(std::string_view text, std::size_t limit,
                              const TokenCounter& counter);
/// Longest suffix that counts to <= limit; drops the oldest context first.
TruncatedText truncate_tokens_left(std::string_view text, std::size_t limit,
                                   const TokenCounter& counter);

}  // namespace drc
