#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "drc/corpus.hpp"
#include "drc/model_backend.hpp"

namespace drc {

struct PerplexityResult {
  double ppl = 1.0;
  std::size_t token_count = 0;
  double logprob_sum = 0.0;
};

/// PPL = exp(-(1/N) * sum of logprobs), over completion tokens only.
PerplexityResult perplexity(std::span<const double> logprobs);
PerplexityResult perplexity(const ScoredCompletion& scores);

struct DesirednessScore {
  std::string entry_id;
  std::string backend_id;
  double ppl_with_comment = 0.0;
  double ppl_without_comment = 0.0;
  double ds = 0.0;
  /// Either prompt lost leading context to fit the truncation limit.
  bool prompt_truncated = false;
};

/// DS = -(ppl_with - ppl_without). Positive when the comment makes the fix
/// more predictable.
constexpr double desiredness_value(double ppl_with, double ppl_without) noexcept {
  return -(ppl_with - ppl_without);
}

struct ScoringOptions {
  std::size_t truncation_limit = 2048;
};

/// Scores one entry on one backend. Both perplexities are taken over the
/// identical fix text; prompts are truncated from the left, the fix never.
DesirednessScore desiredness(const ReviewEntry& entry, const Backend& backend,
                             const ScoringOptions& options = {});

/// Score file record: {"entry_id","backend_id","ppl_with","ppl_without","ds"}.
Json to_json(const DesirednessScore& score);
DesirednessScore score_from_json(const Json& record, std::size_t line);
std::vector<DesirednessScore> load_scores(const std::filesystem::path& path);

}  // namespace drc
