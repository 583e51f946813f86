#include "drc/eval.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "drc/error.hpp"
#include "drc/templates.hpp"
#include "drc/text.hpp"

namespace drc::eval {
namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

}  // namespace

ConfusionCounts confusion(const VerdictMap& verdicts, const Annotations& labels) {
  ConfusionCounts c;
  for (const auto& [id, truth] : labels) {
    auto it = verdicts.find(id);
    if (it == verdicts.end()) {
      throw InputError("labeled entry `" + id + "` has no verdict");
    }
    const bool predicted = it->second == Label::kDesired;
    const bool actual = truth == Label::kDesired;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsReport metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw PreconditionError("metrics of an empty confusion table");
  MetricsReport r;
  r.accuracy = ratio(c.tp + c.tn, c.total());
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  if (r.precision && r.recall && *r.precision + *r.recall > 0) {
    r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
  }
  return r;
}

std::optional<double> percent2(const std::optional<double>& ratio) {
  if (!ratio) return std::nullopt;
  return std::round(*ratio * 10000.0) / 100.0;
}

std::string format_percent(const std::optional<double>& ratio) {
  auto p = percent2(ratio);
  if (!p) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *p);
  return buf;
}

Json to_json(const ConfusionCounts& c) {
  Json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["tn"] = c.tn;
  return j;
}

Json to_json(const MetricsReport& r) {
  Json j;
  j["accuracy"] = optional_number(percent2(r.accuracy));
  j["precision"] = optional_number(percent2(r.precision));
  j["recall"] = optional_number(percent2(r.recall));
  j["f1"] = optional_number(percent2(r.f1));
  return j;
}

std::string format_metrics_table(
    std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s | %9s | %9s | %9s | %9s\n", "Method",
                "Accuracy", "Precision", "Recall", "F1");
  out += buf;
  out += std::string(68, '-') + "\n";
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-20s | %9s | %9s | %9s | %9s\n", name.c_str(),
                  format_percent(r.accuracy).c_str(),
                  format_percent(r.precision).c_str(),
                  format_percent(r.recall).c_str(), format_percent(r.f1).c_str());
    out += buf;
  }
  return out;
}

Label ten_line_rule(const ReviewEntry& entry) {
  if (!entry.new_hunk) return Label::kUndesired;
  return text::normalize_trailing_whitespace(*entry.new_hunk) !=
                 text::normalize_trailing_whitespace(entry.old_hunk)
             ? Label::kDesired
             : Label::kUndesired;
}

Label parse_judge_output(std::string_view output) {
  std::string_view s = text::trim(output);
  while (!s.empty() && !std::isalnum(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  auto starts_with_word = [&](std::string_view word) {
    if (s.size() < word.size()) return false;
    if (text::ascii_lower(s.substr(0, word.size())) != word) return false;
    return s.size() == word.size() ||
           !is_word_byte(static_cast<unsigned char>(s[word.size()]));
  };
  if (starts_with_word("true")) return Label::kDesired;
  if (starts_with_word("false")) return Label::kUndesired;
  throw JudgeParseError("judge output is neither True nor False: `" +
                        std::string(output.substr(0, 80)) + "`");
}

Label llm_judge(const ReviewEntry& entry, const Backend& backend) {
  if (!entry.new_hunk) {
    throw UnscorableError("entry " + entry.entry_id + ": judge needs a recorded fix");
  }
  const std::string prompt = backend.wrap_prompt(templates::render_judge_prompt(
      entry.old_hunk, *entry.new_hunk, entry.comment));
  GenerationParams params;
  params.temperature = 0.0;
  params.max_tokens = 8;
  try {
    return parse_judge_output(backend.generate(prompt, params));
  } catch (const Error& e) {
    rethrow_with_context(e, "entry " + entry.entry_id);
  }
}

std::vector<std::string> bleu_tokenize(std::string_view text_in) {
  const std::string s = text::ascii_lower(text_in);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (is_word_byte(c)) {
      std::size_t j = i;
      while (j < s.size() && is_word_byte(static_cast<unsigned char>(s[j]))) ++j;
      out.emplace_back(s.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(1, s[i]);
      ++i;
    }
  }
  return out;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

}  // namespace

double bleu4(std::string_view candidate, std::string_view reference) {
  const auto ref = bleu_tokenize(reference);
  if (ref.empty()) throw PreconditionError("BLEU reference must be non-empty");
  const auto cand = bleu_tokenize(candidate);
  if (cand.empty()) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand_ngrams = ngrams(cand, n);
    const auto ref_ngrams = ngrams(ref, n);
    std::size_t matches = 0;
    std::size_t total = 0;
    for (const auto& [gram, count] : cand_ngrams) {
      total += count;
      auto it = ref_ngrams.find(gram);
      if (it != ref_ngrams.end()) matches += std::min(count, it->second);
    }
    double precision;
    if (matches > 0) {
      precision = static_cast<double>(matches) / static_cast<double>(total);
    } else if (n == 1) {
      return 0.0;
    } else {
      precision = 1.0 / (static_cast<double>(total) + 1.0);
    }
    log_sum += std::log(precision);
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_sum / 4.0);
}

double mean_bleu4(std::span<const std::string> candidates,
                  std::span<const std::string> references) {
  if (candidates.size() != references.size()) {
    throw PreconditionError("candidate and reference counts differ");
  }
  if (candidates.empty()) throw PreconditionError("no BLEU pairs");
  double sum = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    sum += bleu4(candidates[i], references[i]);
  }
  return sum / static_cast<double>(candidates.size());
}

double chi_squared_survival_df1(double statistic) {
  if (!(statistic >= 0)) throw PreconditionError("chi-squared statistic must be >= 0");
  return boost::math::gamma_q(0.5, statistic / 2.0);
}

ChiSquaredResult chi_squared_2x2(const Table2x2& t) {
  const double a = static_cast<double>(t[0][0]);
  const double b = static_cast<double>(t[0][1]);
  const double c = static_cast<double>(t[1][0]);
  const double d = static_cast<double>(t[1][1]);
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) {
    throw PreconditionError("chi-squared needs non-zero row and column sums");
  }
  const double n = r1 + r2;
  const double cross = a * d - b * c;
  ChiSquaredResult out;
  out.statistic = n * cross * cross / (r1 * r2 * c1 * c2);
  out.p_value = chi_squared_survival_df1(out.statistic);
  return out;
}

ChiSquaredResult chi_squared_2x2(
    const std::vector<std::vector<std::uint64_t>>& table) {
  if (table.size() != 2 || table[0].size() != 2 || table[1].size() != 2) {
    throw PreconditionError("chi-squared test needs a 2x2 table");
  }
  return chi_squared_2x2(Table2x2{{{table[0][0], table[0][1]},
                                   {table[1][0], table[1][1]}}});
}

Table2x2 agreement_table(const Annotations& first, const Annotations& second) {
  Table2x2 t{};
  for (const auto& [id, a] : first) {
    auto it = second.find(id);
    if (it == second.end()) continue;
    const std::size_t row = a == Label::kDesired ? 0 : 1;
    const std::size_t col = it->second == Label::kDesired ? 0 : 1;
    ++t[row][col];
  }
  return t;
}

}  // namespace drc::eval
