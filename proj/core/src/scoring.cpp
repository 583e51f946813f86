#include "drc/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "drc/error.hpp"
#include "drc/templates.hpp"

namespace drc {

PerplexityResult perplexity(std::span<const double> logprobs) {
  if (logprobs.empty()) {
    throw PreconditionError("perplexity needs at least one token");
  }
  // Neumaier summation keeps long completions accurate.
  double sum = 0.0;
  double carry = 0.0;
  for (double v : logprobs) {
    if (!std::isfinite(v)) throw PreconditionError("non-finite logprob");
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  sum += carry;
  PerplexityResult r;
  r.token_count = logprobs.size();
  r.logprob_sum = sum;
  r.ppl = std::exp(-sum / static_cast<double>(r.token_count));
  return r;
}

PerplexityResult perplexity(const ScoredCompletion& scores) {
  std::vector<double> values;
  values.reserve(scores.completion_scores.size());
  for (const auto& s : scores.completion_scores) values.push_back(s.logprob);
  return perplexity(values);
}

DesirednessScore desiredness(const ReviewEntry& entry, const Backend& backend,
                             const ScoringOptions& options) {
  const std::string context = "entry " + entry.entry_id;
  if (!entry.scorable()) {
    throw UnscorableError(context + ": no recorded fix (new_hunk)");
  }
  try {
    const std::string& fix = *entry.new_hunk;
    std::size_t limit = options.truncation_limit;
    if (backend.config().context_limit > 0) {
      limit = std::min(limit, backend.config().context_limit);
    }
    const std::size_t fix_tokens = backend.count_tokens(fix);
    if (fix_tokens > limit) {
      throw OverflowError("fix has " + std::to_string(fix_tokens) +
                          " tokens, truncation limit is " +
                          std::to_string(limit));
    }
    const TokenCounter counter = [&backend](std::string_view t) {
      return backend.count_tokens(t);
    };
    const auto with = truncate_tokens_left(
        backend.wrap_prompt(
            templates::render_refine_prompt(entry.old_hunk, entry.comment)),
        limit - fix_tokens, counter);
    const auto without = truncate_tokens_left(
        backend.wrap_prompt(
            templates::render_refine_prompt(entry.old_hunk, std::nullopt)),
        limit - fix_tokens, counter);

    DesirednessScore out;
    out.entry_id = entry.entry_id;
    out.backend_id = backend.config().backend_id;
    out.ppl_with_comment =
        perplexity(backend.score_completion(with.text, fix)).ppl;
    out.ppl_without_comment =
        perplexity(backend.score_completion(without.text, fix)).ppl;
    out.ds = desiredness_value(out.ppl_with_comment, out.ppl_without_comment);
    out.prompt_truncated = with.truncated || without.truncated;
    return out;
  } catch (const Error& e) {
    rethrow_with_context(e, context);
  }
}

Json to_json(const DesirednessScore& score) {
  Json j;
  j["entry_id"] = score.entry_id;
  j["backend_id"] = score.backend_id;
  j["ppl_with"] = score.ppl_with_comment;
  j["ppl_without"] = score.ppl_without_comment;
  j["ds"] = score.ds;
  return j;
}

DesirednessScore score_from_json(const Json& record, std::size_t line) {
  DesirednessScore s;
  s.entry_id = jsonl::require_string(record, "entry_id", line);
  s.backend_id = jsonl::require_string(record, "backend_id", line);
  s.ppl_with_comment = jsonl::require_number(record, "ppl_with", line);
  s.ppl_without_comment = jsonl::require_number(record, "ppl_without", line);
  s.ds = jsonl::require_number(record, "ds", line);
  return s;
}

std::vector<DesirednessScore> load_scores(const std::filesystem::path& path) {
  std::vector<DesirednessScore> out;
  jsonl::read_file(path, [&](const Json& record, std::size_t line) {
    out.push_back(score_from_json(record, line));
  });
  return out;
}

}  // namespace drc
