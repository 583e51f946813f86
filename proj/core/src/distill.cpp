#include "drc/distill.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "drc/error.hpp"
#include "drc/templates.hpp"

namespace drc {

double median(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("median of an empty list");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return (lower + upper) / 2.0;
}

DesirednessVerdict median_consensus(std::span<const DesirednessScore> scores) {
  if (scores.empty()) throw PreconditionError("consensus needs at least one score");
  DesirednessVerdict v;
  v.entry_id = scores.front().entry_id;
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) {
    if (s.entry_id != v.entry_id) {
      throw PreconditionError("consensus over mixed entries `" + v.entry_id +
                              "` and `" + s.entry_id + "`");
    }
    if (!v.per_backend_ds.emplace(s.backend_id, s.ds).second) {
      throw InputError("entry `" + v.entry_id + "` has two scores from backend `" +
                       s.backend_id + "`");
    }
    values.push_back(s.ds);
  }
  v.consensus_ds = median(std::move(values));
  v.verdict = verdict_for(v.consensus_ds);
  return v;
}

ConsensusResult build_verdicts(std::span<const DesirednessScore> scores,
                               std::span<const std::string> expected_backends) {
  std::map<std::string, std::vector<DesirednessScore>> by_entry;
  for (const auto& s : scores) by_entry[s.entry_id].push_back(s);

  ConsensusResult out;
  for (auto& [id, group] : by_entry) {
    std::set<std::string_view> present;
    for (const auto& s : group) present.insert(s.backend_id);
    const bool complete = std::all_of(
        expected_backends.begin(), expected_backends.end(),
        [&](const std::string& b) { return present.count(b) > 0; });
    if (!complete) {
      out.incomplete.push_back(id);
      continue;
    }
    // Order by backend id so the result does not depend on file order.
    std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) {
      return a.backend_id < b.backend_id;
    });
    out.verdicts.emplace(id, median_consensus(group));
  }
  return out;
}

Json to_json(const DesirednessVerdict& verdict) {
  Json j;
  j["entry_id"] = verdict.entry_id;
  Json per = Json::object();
  for (const auto& [backend, ds] : verdict.per_backend_ds) per[backend] = ds;
  j["per_backend_ds"] = std::move(per);
  j["consensus_ds"] = verdict.consensus_ds;
  j["verdict"] = to_string(verdict.verdict);
  return j;
}

DesirednessVerdict verdict_from_json(const Json& record, std::size_t line) {
  DesirednessVerdict v;
  v.entry_id = jsonl::require_string(record, "entry_id", line);
  v.consensus_ds = jsonl::require_number(record, "consensus_ds", line);
  const auto& raw = jsonl::require_string(record, "verdict", line);
  auto label = parse_label(raw);
  if (!label) throw InputError("unknown verdict `" + raw + "`", line);
  if (*label != verdict_for(v.consensus_ds)) {
    throw InputError("verdict `" + raw + "` contradicts consensus_ds", line);
  }
  v.verdict = *label;
  if (auto per = record.find("per_backend_ds"); per != record.end()) {
    if (!per->is_object()) {
      throw InputError("per_backend_ds must be an object", line);
    }
    for (const auto& [backend, ds] : per->items()) {
      if (!ds.is_number()) throw InputError("per_backend_ds values must be numbers", line);
      v.per_backend_ds[backend] = ds.get<double>();
    }
  }
  return v;
}

VerdictSet load_verdicts(const std::filesystem::path& path) {
  VerdictSet out;
  jsonl::read_file(path, [&](const Json& record, std::size_t line) {
    auto v = verdict_from_json(record, line);
    std::string id = v.entry_id;
    if (!out.emplace(std::move(id), std::move(v)).second) {
      throw InputError("duplicate verdict for `" + record["entry_id"].get<std::string>() + "`", line);
    }
  });
  return out;
}

Partition partition(const Corpus& corpus, const VerdictSet& verdicts) {
  for (const auto& [id, v] : verdicts) {
    if (!corpus.find(id)) {
      throw InputError("verdict for unknown entry `" + id + "`");
    }
  }
  Partition p;
  for (const auto& e : corpus.entries()) {
    auto it = verdicts.find(e.entry_id);
    if (it == verdicts.end()) {
      p.unscorable.push_back(&e);
    } else if (it->second.verdict == Label::kDesired) {
      p.desired.push_back(&e);
    } else {
      p.undesired.push_back(&e);
    }
  }
  return p;
}

namespace {

TruncatedText fit_hunk(std::string_view hunk, const EmitOptions& options) {
  const std::size_t frame = options.counter(templates::render_review_prompt(""));
  if (options.truncation_limit <= frame) {
    throw PreconditionError("truncation limit " +
                            std::to_string(options.truncation_limit) +
                            " leaves no room for the hunk");
  }
  return truncate_tokens(hunk, options.truncation_limit - frame, options.counter);
}

}  // namespace

std::vector<SftRecord> emit_sft(std::span<const ReviewEntry* const> desired,
                                const EmitOptions& options) {
  std::vector<SftRecord> out;
  out.reserve(desired.size());
  for (const ReviewEntry* e : desired) {
    auto hunk = fit_hunk(e->old_hunk, options);
    SftRecord r;
    r.entry_id = e->entry_id;
    r.instruction_prompt = templates::render_review_prompt(hunk.text);
    r.instruction = std::string(templates::review_instruction());
    r.input = std::move(hunk.text);
    r.target_comment = e->comment;
    r.truncated = hunk.truncated;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<KtoRecord> emit_kto(std::span<const ReviewEntry* const> scored,
                                const VerdictSet& verdicts,
                                const EmitOptions& options) {
  std::vector<KtoRecord> out;
  out.reserve(scored.size());
  for (const ReviewEntry* e : scored) {
    auto it = verdicts.find(e->entry_id);
    if (it == verdicts.end()) {
      throw InputError("no verdict for entry `" + e->entry_id + "`");
    }
    auto hunk = fit_hunk(e->old_hunk, options);
    KtoRecord r;
    r.entry_id = e->entry_id;
    r.prompt = templates::render_review_prompt(hunk.text);
    r.completion = e->comment;
    r.label = it->second.verdict;
    r.truncated = hunk.truncated;
    out.push_back(std::move(r));
  }
  return out;
}

Json to_json(const SftRecord& record) {
  Json j;
  j["instruction"] = record.instruction;
  j["input"] = record.input;
  j["output"] = record.target_comment;
  return j;
}

Json to_json(const KtoRecord& record) {
  Json j;
  j["prompt"] = record.prompt;
  j["completion"] = record.completion;
  j["label"] = to_string(record.label);
  return j;
}

std::optional<double> rounded_percent(std::size_t count, std::size_t total) {
  if (total == 0) return std::nullopt;
  // round-half-up(count * 10000 / total) in hundredths of a percent
  const unsigned long long num = 2ULL * count * 10000ULL + total;
  const unsigned long long hundredths = num / (2ULL * total);
  return static_cast<double>(hundredths) / 100.0;
}

CorpusStats compute_stats(std::size_t desired, std::size_t undesired,
                          std::size_t unscorable) {
  CorpusStats s;
  s.desired = desired;
  s.undesired = undesired;
  s.unscorable = unscorable;
  s.total = desired + undesired + unscorable;
  s.desired_pct = rounded_percent(desired, desired + undesired);
  s.undesired_pct = rounded_percent(undesired, desired + undesired);
  return s;
}

CorpusStats compute_stats(const VerdictSet& verdicts, std::size_t unscorable) {
  std::size_t desired = 0;
  for (const auto& [id, v] : verdicts) {
    if (v.verdict == Label::kDesired) ++desired;
  }
  return compute_stats(desired, verdicts.size() - desired, unscorable);
}

Json to_json(const CorpusStats& stats) {
  Json j;
  j["total"] = stats.total;
  j["desired"] = stats.desired;
  j["undesired"] = stats.undesired;
  j["desired_pct"] = stats.desired_pct ? Json(*stats.desired_pct) : Json(nullptr);
  j["undesired_pct"] =
      stats.undesired_pct ? Json(*stats.undesired_pct) : Json(nullptr);
  j["unscorable"] = stats.unscorable;
  return j;
}

namespace {
std::string percent_cell(std::size_t count, const std::optional<double>& pct) {
  char buf[64];
  if (pct) {
    std::snprintf(buf, sizeof buf, "%zu (%.2f%%)", count, *pct);
  } else {
    std::snprintf(buf, sizeof buf, "%zu (n/a)", count);
  }
  return buf;
}
}  // namespace

std::string format_stats_table(
    std::span<const std::pair<std::string, CorpusStats>> rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s | %-16s | %-18s | %-18s | %s\n", "Dataset",
                "Total", "Desired", "Undesired", "Unscorable");
  out += buf;
  out += std::string(84, '-') + "\n";
  for (const auto& [name, s] : rows) {
    const std::size_t scored = s.desired + s.undesired;
    std::string total = std::to_string(scored) + (scored ? " (100%)" : "");
    std::snprintf(buf, sizeof buf, "%-12s | %-16s | %-18s | %-18s | %zu\n",
                  name.c_str(), total.c_str(),
                  percent_cell(s.desired, s.desired_pct).c_str(),
                  percent_cell(s.undesired, s.undesired_pct).c_str(),
                  s.unscorable);
    out += buf;
  }
  return out;
}

}  // namespace drc
