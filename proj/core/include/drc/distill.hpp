#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drc/corpus.hpp"
#include "drc/scoring.hpp"

namespace drc {

/// desired iff the consensus score is strictly positive.
constexpr Label verdict_for(double consensus_ds) noexcept {
  return consensus_ds > 0.0 ? Label::kDesired : Label::kUndesired;
}

struct DesirednessVerdict {
  std::string entry_id;
  std::map<std::string, double> per_backend_ds;
  double consensus_ds = 0.0;
  Label verdict = Label::kUndesired;
};

using VerdictSet = std::map<std::string, DesirednessVerdict, std::less<>>;

/// Median; an even count averages the two middle values.
double median(std::vector<double> values);

/// Consensus of one entry's per-backend scores.
DesirednessVerdict median_consensus(std::span<const DesirednessScore> scores);

struct ConsensusResult {
  VerdictSet verdicts;
  /// Entries missing a score from at least one expected backend.
  std::vector<std::string> incomplete;
};

/// Groups scores by entry and takes the median per entry. Entries lacking any
/// of `expected_backends` are not judged; they are listed in `incomplete`.
ConsensusResult build_verdicts(std::span<const DesirednessScore> scores,
                               std::span<const std::string> expected_backends);

Json to_json(const DesirednessVerdict& verdict);
DesirednessVerdict verdict_from_json(const Json& record, std::size_t line);
VerdictSet load_verdicts(const std::filesystem::path& path);

using EntryRefs = std::vector<const ReviewEntry*>;

struct Partition {
  EntryRefs desired;
  EntryRefs undesired;
  EntryRefs unscorable;
};

/// Splits the corpus by verdict, keeping corpus order within each part.
/// Entries without a verdict are unscorable.
Partition partition(const Corpus& corpus, const VerdictSet& verdicts);

struct EmitOptions {
  std::size_t truncation_limit = 2048;
  TokenCounter counter = count_bytes;
};

struct SftRecord {
  std::string entry_id;
  std::string instruction_prompt;  // fully rendered review prompt
  std::string instruction;
  std::string input;  // hunk, possibly truncated
  std::string target_comment;
  bool truncated = false;
};

struct KtoRecord {
  std::string entry_id;
  std::string prompt;
  std::string completion;
  Label label = Label::kUndesired;
  bool truncated = false;
};

std::vector<SftRecord> emit_sft(std::span<const ReviewEntry* const> desired,
                                const EmitOptions& options = {});
std::vector<KtoRecord> emit_kto(std::span<const ReviewEntry* const> scored,
                                const VerdictSet& verdicts,
                                const EmitOptions& options = {});

/// {"instruction","input","output"}
Json to_json(const SftRecord& record);
/// {"prompt","completion","label"}
Json to_json(const KtoRecord& record);

struct CorpusStats {
  std::size_t total = 0;
  std::size_t desired = 0;
  std::size_t undesired = 0;
  std::size_t unscorable = 0;
  /// Over the scored total, half-up to 2 decimals; empty when nothing scored.
  std::optional<double> desired_pct;
  std::optional<double> undesired_pct;
};

/// Percentage rounded half-up to two decimals using integer arithmetic.
std::optional<double> rounded_percent(std::size_t count, std::size_t total);

CorpusStats compute_stats(std::size_t desired, std::size_t undesired,
                          std::size_t unscorable = 0);
CorpusStats compute_stats(const VerdictSet& verdicts,
                          std::size_t unscorable = 0);

Json to_json(const CorpusStats& stats);
std::string format_stats_table(std::span<const std::pair<std::string, CorpusStats>> rows);

}  // namespace drc
