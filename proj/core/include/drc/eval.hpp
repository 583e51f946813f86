#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drc/corpus.hpp"
#include "drc/model_backend.hpp"

namespace drc::eval {

/// Positive class is "desired".
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

using VerdictMap = std::map<std::string, Label, std::less<>>;

/// Counts over every labeled id; a labeled id without a verdict is an error.
ConfusionCounts confusion(const VerdictMap& verdicts, const Annotations& labels);

/// Ratios in [0, 1]; empty where the denominator is zero.
struct MetricsReport {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

MetricsReport metrics(const ConfusionCounts& counts);

/// Ratio as a percentage rounded to 2 decimals; "n/a" when undefined.
std::string format_percent(const std::optional<double>& ratio);
std::optional<double> percent2(const std::optional<double>& ratio);

Json to_json(const ConfusionCounts& counts);
Json to_json(const MetricsReport& report);

std::string format_metrics_table(
    std::span<const std::pair<std::string, MetricsReport>> rows);

/// Baseline: desired iff a fix exists and differs from the original hunk
/// once trailing whitespace is normalized.
Label ten_line_rule(const ReviewEntry& entry);

/// Leading True/False, case-insensitive, punctuation tolerant.
Label parse_judge_output(std::string_view output);

/// Zero-shot judge at temperature 0. Needs a recorded fix.
Label llm_judge(const ReviewEntry& entry, const Backend& backend);

/// Lowercased word and punctuation tokens.
std::vector<std::string> bleu_tokenize(std::string_view text);

/// Sentence BLEU-4 with brevity penalty; zero n-gram matches for n >= 2 are
/// add-one smoothed.
double bleu4(std::string_view candidate, std::string_view reference);

/// Mean sentence BLEU-4 over aligned pairs.
double mean_bleu4(std::span<const std::string> candidates,
                  std::span<const std::string> references);

struct ChiSquaredResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

using Table2x2 = std::array<std::array<std::uint64_t, 2>, 2>;

/// Pearson chi-squared without continuity correction, 1 degree of freedom.
ChiSquaredResult chi_squared_2x2(const Table2x2& table);
/// Validates the shape first.
ChiSquaredResult chi_squared_2x2(
    const std::vector<std::vector<std::uint64_t>>& table);

/// Upper tail of chi-squared(1).
double chi_squared_survival_df1(double statistic);

/// Cross-tabulation of two annotators over their shared ids:
/// rows = first annotator (desired, undesired), columns = second.
Table2x2 agreement_table(const Annotations& first, const Annotations& second);

}  // namespace drc::eval
