#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <variant>

#include "drc/config.hpp"
#include "drc/digest.hpp"
#include "drc/distill.hpp"
#include "drc/eval.hpp"
#include "drc/jsonl.hpp"
#include "drc/kto.hpp"
#include "drc/scoring.hpp"
#include "drc/templates.hpp"
#include "manifest.hpp"
#include "parallel.hpp"

namespace drc::cli {
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kTransport:
    case ErrorKind::kProtocol: return kExitTransport;
    case ErrorKind::kJudgeParse: return kExitPartial;
    case ErrorKind::kInput:
    case ErrorKind::kPrecondition:
    case ErrorKind::kOverflow:
    case ErrorKind::kUnscorable: return kExitInput;
  }
  return kExitUsage;
}

namespace {

struct FailedUnit {
  std::string entry_id;
  std::string backend_id;
  ErrorKind kind;
  std::string message;
};

Json to_json(const FailedUnit& f) {
  Json j;
  j["entry_id"] = f.entry_id;
  j["backend_id"] = f.backend_id;
  j["kind"] = to_string(f.kind);
  j["message"] = f.message;
  return j;
}

fs::path sibling(const fs::path& path, std::string_view suffix) {
  fs::path p = path;
  p += std::string(suffix);
  return p;
}

std::string join_lines(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += jsonl::dump(r);
    out += '\n';
  }
  return out;
}

template <typename T>
std::string join_records(const std::vector<T>& records) {
  std::string out;
  for (const auto& r : records) {
    out += jsonl::dump(to_json(r));
    out += '\n';
  }
  return out;
}

Json string_array(const std::vector<std::string>& values) {
  Json j = Json::array();
  for (const auto& v : values) j.push_back(v);
  return j;
}

/// Reads an existing score file for resumption. A torn final line (no
/// trailing newline) from an interrupted run is dropped.
std::vector<DesirednessScore> read_existing_scores(const fs::path& path,
                                                   std::ostream& log) {
  std::string content = jsonl::read_text_file(path);
  if (!content.empty() && content.back() != '\n') {
    const auto cut = content.rfind('\n');
    content.resize(cut == std::string::npos ? 0 : cut + 1);
    log << "warning: dropped incomplete last line of " << path.string() << "\n";
  }
  std::istringstream in(content);
  std::vector<DesirednessScore> out;
  jsonl::read(in, [&](const Json& record, std::size_t line) {
    out.push_back(score_from_json(record, line));
  });
  return out;
}

ToolConfig load_optional_config(const std::optional<fs::path>& path,
                                RunManifest& manifest) {
  ToolConfig cfg = path ? load_config(*path) : ToolConfig{};
  if (path) manifest.add_input(*path);
  manifest.config_digest = sha256_hex(dump_effective_config(cfg));
  return cfg;
}

std::vector<std::string> read_plain_lines(const fs::path& path) {
  std::string content = jsonl::read_text_file(path);
  std::vector<std::string> lines;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::map<std::string, std::string> read_text_records(const fs::path& path) {
  std::map<std::string, std::string> out;
  jsonl::read_file(path, [&](const Json& record, std::size_t line) {
    const auto& id = jsonl::require_string(record, "entry_id", line);
    const auto& text = jsonl::require_string(record, "text", line);
    if (!out.emplace(id, text).second) {
      throw InputError("duplicate entry_id `" + id + "`", line);
    }
  });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// score

int cmd_score(const ScoreArgs& args, std::ostream& log) {
  RunManifest manifest = start_manifest("score");
  const ToolConfig cfg = load_config(args.config);
  if (cfg.backends.empty()) throw ConfigError("no backends configured");
  const std::string effective = dump_effective_config(cfg);
  log << "effective config:\n" << effective;
  manifest.config_digest = sha256_hex(effective);
  manifest.add_input(args.config);
  manifest.add_input(args.corpus);

  const Corpus corpus = load_corpus(args.corpus, args.split);
  std::vector<std::unique_ptr<Backend>> backends;
  std::map<std::string, std::size_t, std::less<>> backend_index;
  for (const auto& b : cfg.backends) {
    backend_index.emplace(b.backend_id, backends.size());
    backends.push_back(make_backend(b));
  }

  // Keyed by (corpus index, backend index): iteration order is output order.
  std::map<std::pair<std::size_t, std::size_t>, DesirednessScore> results;
  if (fs::exists(args.out)) {
    manifest.details["resumed_from"] = sha256_file_hex(args.out);
    for (auto& s : read_existing_scores(args.out, log)) {
      auto e = corpus.index_of(s.entry_id);
      auto b = backend_index.find(s.backend_id);
      if (!e || b == backend_index.end()) {
        throw InputError("existing output " + args.out.string() +
                         " has a score for unknown entry/backend `" +
                         s.entry_id + "`/`" + s.backend_id + "`");
      }
      results.emplace(std::pair{*e, b->second}, std::move(s));
    }
  }
  const std::size_t resumed = results.size();

  auto write_canonical = [&] {
    std::string content;
    for (const auto& [key, s] : results) {
      content += jsonl::dump(to_json(s));
      content += '\n';
    }
    jsonl::write_text_file(args.out, content);
  };
  write_canonical();

  std::vector<std::string> unscorable;
  for (const auto& e : corpus.entries()) {
    if (!e.scorable()) unscorable.push_back(e.entry_id);
  }

  const ScoringOptions options{cfg.truncation_limit};
  std::map<std::pair<std::size_t, std::size_t>, FailedUnit> failures;
  std::set<std::string> truncated;
  std::size_t computed = 0;
  {
    jsonl::Writer writer(args.out, /*append=*/true);
    for (std::size_t b = 0; b < backends.size(); ++b) {
      std::vector<std::size_t> todo;
      for (std::size_t e = 0; e < corpus.size(); ++e) {
        if (corpus.entries()[e].scorable() && !results.count({e, b})) {
          todo.push_back(e);
        }
      }
      const Backend& backend = *backends[b];
      log << "backend " << backend.config().backend_id << ": " << todo.size()
          << " entries to score\n";
      using Outcome = std::variant<DesirednessScore, FailedUnit>;
      parallel_for_each(
          todo.size(), backend.config().max_parallel,
          [&](std::size_t i) -> Outcome {
            const ReviewEntry& entry = corpus.entries()[todo[i]];
            try {
              return desiredness(entry, backend, options);
            } catch (const Error& err) {
              return FailedUnit{entry.entry_id, backend.config().backend_id,
                                err.kind(), err.what()};
            } catch (const std::exception& err) {
              return FailedUnit{entry.entry_id, backend.config().backend_id,
                                ErrorKind::kProtocol, err.what()};
            }
          },
          [&](std::size_t i, Outcome outcome) {
            const std::pair key{todo[i], b};
            if (auto* s = std::get_if<DesirednessScore>(&outcome)) {
              writer.write(to_json(*s));
              writer.flush();
              if (s->prompt_truncated) truncated.insert(s->entry_id);
              results.emplace(key, std::move(*s));
              ++computed;
            } else {
              auto& f = std::get<FailedUnit>(outcome);
              log << "error: " << f.message << "\n";
              failures.emplace(key, std::move(f));
            }
          });
    }
  }
  write_canonical();

  const fs::path errors_path = sibling(args.out, ".errors.jsonl");
  if (failures.empty()) {
    fs::remove(errors_path);
  } else {
    std::vector<Json> records;
    for (const auto& [key, f] : failures) records.push_back(to_json(f));
    jsonl::write_text_file(errors_path, join_lines(records));
  }

  bool all_transport = !failures.empty();
  std::map<std::string, std::size_t> by_kind;
  for (const auto& [key, f] : failures) {
    ++by_kind[std::string(to_string(f.kind))];
    all_transport = all_transport && f.kind == ErrorKind::kTransport;
  }
  int code = kExitOk;
  std::string status = "ok";
  if (!failures.empty()) {
    if (all_transport && computed == 0) {
      code = kExitTransport;
      status = "transport-failure";
    } else {
      code = kExitPartial;
      status = "partial-failure";
    }
  }

  Json backends_json = Json::array();
  for (const auto& b : cfg.backends) backends_json.push_back(drc::to_json(b));
  manifest.details["backends"] = std::move(backends_json);
  manifest.details["truncation_limit"] = cfg.truncation_limit;
  manifest.details["entries"] = corpus.size();
  manifest.details["unscorable"] = string_array(unscorable);
  manifest.details["resumed_scores"] = resumed;
  manifest.details["computed_scores"] = computed;
  manifest.details["failed_units"] = failures.size();
  Json kinds = Json::object();
  for (const auto& [k, n] : by_kind) kinds[k] = n;
  manifest.details["failures_by_kind"] = std::move(kinds);
  manifest.details["truncated_prompts"] =
      string_array({truncated.begin(), truncated.end()});
  manifest.details["output_digest"] = sha256_file_hex(args.out);
  manifest.finish(status);
  manifest.write(sibling(args.out, ".manifest.json"));

  log << "scored " << computed << " new, " << resumed << " resumed, "
      << failures.size() << " failed, " << unscorable.size() << " unscorable\n";
  return code;
}

// ---------------------------------------------------------------------------
// distill

int cmd_distill(const DistillArgs& args, std::ostream& out, std::ostream& log) {
  RunManifest manifest = start_manifest("distill");
  const ToolConfig cfg = load_optional_config(args.config, manifest);
  manifest.add_input(args.corpus);
  manifest.add_input(args.scores);

  const Corpus corpus = load_corpus(args.corpus, args.split);
  const auto scores = load_scores(args.scores);
  for (const auto& s : scores) {
    if (!corpus.find(s.entry_id)) {
      throw InputError("score for entry `" + s.entry_id +
                       "` which is not in the corpus");
    }
  }

  std::vector<std::string> expected;
  if (args.config && !cfg.backends.empty()) {
    for (const auto& b : cfg.backends) expected.push_back(b.backend_id);
  } else {
    std::set<std::string> ids;
    for (const auto& s : scores) ids.insert(s.backend_id);
    expected.assign(ids.begin(), ids.end());
  }

  const ConsensusResult consensus = build_verdicts(scores, expected);
  const Partition parts = partition(corpus, consensus.verdicts);

  auto by_id = [](const ReviewEntry* a, const ReviewEntry* b) {
    return a->entry_id < b->entry_id;
  };
  EntryRefs desired = parts.desired;
  std::sort(desired.begin(), desired.end(), by_id);
  EntryRefs scored = parts.desired;
  scored.insert(scored.end(), parts.undesired.begin(), parts.undesired.end());
  std::sort(scored.begin(), scored.end(), by_id);

  EmitOptions options;
  options.truncation_limit = cfg.truncation_limit;
  const auto sft = emit_sft(desired, options);
  const auto kto = emit_kto(scored, consensus.verdicts, options);

  std::vector<DesirednessVerdict> verdict_list;
  for (const auto& [id, v] : consensus.verdicts) verdict_list.push_back(v);

  const CorpusStats stats = compute_stats(consensus.verdicts, parts.unscorable.size());
  const std::string split(to_string(args.split));
  const std::vector<std::pair<std::string, CorpusStats>> rows{{split, stats}};
  const std::string table = format_stats_table(rows);

  Json stats_json = drc::to_json(stats);
  stats_json["split"] = split;

  std::vector<std::string> unscorable_ids, truncated_sft, truncated_kto;
  for (const auto* e : parts.unscorable) unscorable_ids.push_back(e->entry_id);
  for (const auto& r : sft) if (r.truncated) truncated_sft.push_back(r.entry_id);
  for (const auto& r : kto) if (r.truncated) truncated_kto.push_back(r.entry_id);

  Json metadata;
  metadata["review_template"] = templates::render_review_prompt("{hunk}");
  metadata["sft_fields"] = "instruction = review_template first line, input = hunk, output = comment";
  metadata["truncation_limit"] = cfg.truncation_limit;
  metadata["token_counter"] = "bytes";
  metadata["backends"] = string_array(expected);
  metadata["truncated_sft"] = string_array(truncated_sft);
  metadata["truncated_kto"] = string_array(truncated_kto);
  metadata["unscorable"] = string_array(unscorable_ids);
  metadata["incomplete_scores"] = string_array(consensus.incomplete);

  fs::create_directories(args.out_dir);
  jsonl::write_text_file(args.out_dir / "verdicts.jsonl", join_records(verdict_list));
  jsonl::write_text_file(args.out_dir / "sft.jsonl", join_records(sft));
  jsonl::write_text_file(args.out_dir / "kto.jsonl", join_records(kto));
  jsonl::write_text_file(args.out_dir / "stats.json", stats_json.dump(2) + "\n");
  jsonl::write_text_file(args.out_dir / "stats.txt", table);
  jsonl::write_text_file(args.out_dir / "metadata.json", metadata.dump(2) + "\n");

  if (desired.empty()) log << "warning: no desired entries; sft.jsonl is empty\n";
  if (!consensus.incomplete.empty()) {
    log << "warning: " << consensus.incomplete.size()
        << " entries lack scores from some backend and were not judged\n";
  }

  manifest.details["verdicts"] = verdict_list.size();
  manifest.details["sft_records"] = sft.size();
  manifest.details["kto_records"] = kto.size();
  manifest.details["unscorable"] = unscorable_ids.size();
  manifest.finish("ok");
  manifest.write(args.out_dir / "manifest.json");

  out << table;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval-identification

int cmd_eval_identification(const EvalIdentificationArgs& args, std::ostream& out,
                            std::ostream& log) {
  RunManifest manifest = start_manifest("eval-identification");
  if (!fs::exists(args.annotations)) {
    throw InputError("annotation file " + args.annotations.string() + " not found");
  }
  Annotations labels = load_annotations(args.annotations);
  manifest.add_input(args.annotations);

  eval::VerdictMap verdicts;
  std::string method;
  std::vector<FailedUnit> judge_errors;
  const bool use_verdicts = args.verdicts.has_value();
  if (use_verdicts == (args.baseline != Baseline::kNone)) {
    throw ConfigError("give exactly one of --verdicts or --baseline");
  }
  ToolConfig cfg = load_optional_config(args.config, manifest);

  if (use_verdicts) {
    manifest.add_input(*args.verdicts);
    for (const auto& [id, v] : load_verdicts(*args.verdicts)) verdicts[id] = v.verdict;
    method = "Perplexity consensus";
  } else {
    if (!args.corpus) throw ConfigError("baselines need --corpus");
    manifest.add_input(*args.corpus);
    const Corpus corpus = load_corpus(*args.corpus, SplitTag::kOther);
    if (args.baseline == Baseline::kTenLine) {
      method = "10-line rule";
      for (const auto& e : corpus.entries()) verdicts[e.entry_id] = eval::ten_line_rule(e);
    } else {
      method = "LLM judge";
      if (cfg.backends.empty()) throw ConfigError("llm-judge needs a config with backends");
      const BackendConfig* chosen = nullptr;
      for (const auto& b : cfg.backends) {
        if (!args.judge_backend || b.backend_id == *args.judge_backend) {
          chosen = &b;
          break;
        }
      }
      if (!chosen) throw ConfigError("judge backend `" + *args.judge_backend + "` not configured");
      const auto backend = make_backend(*chosen);
      std::vector<const ReviewEntry*> todo;
      for (const auto& [id, label] : labels) {
        const ReviewEntry* e = corpus.find(id);
        if (!e) throw InputError("labeled entry `" + id + "` is not in the corpus");
        todo.push_back(e);
      }
      using Outcome = std::variant<Label, FailedUnit>;
      std::map<std::size_t, FailedUnit> failed;
      parallel_for_each(
          todo.size(), chosen->max_parallel,
          [&](std::size_t i) -> Outcome {
            try {
              return eval::llm_judge(*todo[i], *backend);
            } catch (const Error& err) {
              return FailedUnit{todo[i]->entry_id, chosen->backend_id, err.kind(),
                                err.what()};
            }
          },
          [&](std::size_t i, Outcome outcome) {
            if (auto* l = std::get_if<Label>(&outcome)) {
              verdicts[todo[i]->entry_id] = *l;
            } else {
              failed.emplace(i, std::get<FailedUnit>(std::move(outcome)));
            }
          });
      for (auto& [i, f] : failed) {
        log << "judge error: " << f.message << "\n";
        labels.erase(f.entry_id);
        judge_errors.push_back(std::move(f));
      }
      manifest.details["judge_backend"] = drc::to_json(*chosen);
    }
  }
  if (!args.method_name.empty()) method = args.method_name;

  const auto counts = eval::confusion(verdicts, labels);
  const auto report = eval::metrics(counts);
  const std::vector<std::pair<std::string, eval::MetricsReport>> rows{{method, report}};
  out << eval::format_metrics_table(rows);

  Json result;
  result["method"] = method;
  result["labeled"] = labels.size();
  result["counts"] = eval::to_json(counts);
  result["metrics"] = eval::to_json(report);
  if (args.baseline == Baseline::kLlmJudge) {
    Json errs = Json::array();
    for (const auto& f : judge_errors) errs.push_back(to_json(f));
    result["judge_errors"] = std::move(errs);
  }
  if (args.second_annotations) {
    manifest.add_input(*args.second_annotations);
    const auto table =
        eval::agreement_table(load_annotations(args.annotations),
                              load_annotations(*args.second_annotations));
    const auto chi = eval::chi_squared_2x2(table);
    Json agreement;
    agreement["table"] = {{table[0][0], table[0][1]}, {table[1][0], table[1][1]}};
    agreement["statistic"] = chi.statistic;
    agreement["p_value"] = chi.p_value;
    result["agreement"] = std::move(agreement);
    char buf[128];
    std::snprintf(buf, sizeof buf, "annotator agreement: chi2 = %.6g, p = %.6g\n",
                  chi.statistic, chi.p_value);
    out << buf;
  }
  jsonl::write_text_file(args.out, result.dump(2) + "\n");

  const int code = judge_errors.empty() ? kExitOk : kExitPartial;
  manifest.finish(code == kExitOk ? "ok" : "partial-failure");
  manifest.write(sibling(args.out, ".manifest.json"));
  return code;
}

// ---------------------------------------------------------------------------
// eval-generation

int cmd_eval_generation(const EvalGenerationArgs& args, std::ostream& out,
                        std::ostream&) {
  RunManifest manifest = start_manifest("eval-generation");
  manifest.config_digest = sha256_hex(dump_effective_config(ToolConfig{}));
  manifest.add_input(args.candidates);
  manifest.add_input(args.references);

  std::vector<std::string> candidates, references;
  auto is_jsonl = [](const fs::path& p) { return p.extension() == ".jsonl"; };
  if (is_jsonl(args.candidates) != is_jsonl(args.references)) {
    throw InputError("candidates and references must use the same format");
  }
  if (is_jsonl(args.references)) {
    const auto cand = read_text_records(args.candidates);
    for (const auto& [id, text] : read_text_records(args.references)) {
      auto it = cand.find(id);
      if (it == cand.end()) throw InputError("no candidate for entry `" + id + "`");
      references.push_back(text);
      candidates.push_back(it->second);
    }
    if (cand.size() != references.size()) {
      throw InputError("candidates contain ids missing from the references");
    }
  } else {
    candidates = read_plain_lines(args.candidates);
    references = read_plain_lines(args.references);
    if (candidates.size() != references.size()) {
      throw InputError("candidate and reference line counts differ (" +
                       std::to_string(candidates.size()) + " vs " +
                       std::to_string(references.size()) + ")");
    }
  }
  const double bleu = eval::mean_bleu4(candidates, references);

  Json result;
  result["pairs"] = candidates.size();
  result["bleu4"] = bleu;
  jsonl::write_text_file(args.out, result.dump(2) + "\n");
  char buf[96];
  std::snprintf(buf, sizeof buf, "BLEU-4 over %zu pairs: %.4f (%.2f)\n",
                candidates.size(), bleu, bleu * 100.0);
  out << buf;

  manifest.finish("ok");
  manifest.write(sibling(args.out, ".manifest.json"));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// kto-check

int cmd_kto_check(const KtoCheckArgs& args, std::ostream& out, std::ostream&) {
  RunManifest manifest = start_manifest("kto-check");
  const ToolConfig cfg = load_optional_config(args.config, manifest);
  manifest.add_input(args.kto_file);

  std::size_t n_desired = 0, n_undesired = 0;
  jsonl::read_file(args.kto_file, [&](const Json& record, std::size_t line) {
    const auto& raw = jsonl::require_string(record, "label", line);
    auto label = parse_label(raw);
    if (!label) throw InputError("unknown label `" + raw + "`", line);
    ++(*label == Label::kDesired ? n_desired : n_undesired);
  });
  const auto check = kto::check_lambda_constraint(cfg.kto, n_desired, n_undesired);

  Json report;
  report["n_desired"] = n_desired;
  report["n_undesired"] = n_undesired;
  report["beta"] = cfg.kto.beta;
  report["lambda_desired"] = cfg.kto.lambda_desired;
  report["lambda_undesired"] = cfg.kto.lambda_undesired;
  report["ratio"] = check.ratio;
  report["ok"] = check.ok;
  report["lambda_desired_range"] = {check.lambda_desired_range.first,
                                    check.lambda_desired_range.second};

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "n_desired=%zu n_undesired=%zu lambda_D=%g lambda_U=%g ratio=%.4f "
                "(required [1, 4/3]): %s\n",
                n_desired, n_undesired, cfg.kto.lambda_desired,
                cfg.kto.lambda_undesired, check.ratio, check.ok ? "ok" : "NOT OK");
  out << buf;
  if (!check.ok) {
    std::snprintf(buf, sizeof buf,
                  "suggested lambda_desired for lambda_undesired=%g: [%.4f, %.4f]\n",
                  cfg.kto.lambda_undesired, check.lambda_desired_range.first,
                  check.lambda_desired_range.second);
    out << buf;
  }

  if (args.logprobs) {
    manifest.add_input(*args.logprobs);
    const auto examples = kto::load_examples(*args.logprobs);
    double z0 = 0.0;
    std::string z0_source = "default";
    if (args.z0) {
      z0 = *args.z0;
      z0_source = "explicit";
    } else if (args.mismatched) {
      manifest.add_input(*args.mismatched);
      std::vector<double> rewards;
      jsonl::read_file(*args.mismatched, [&](const Json& record, std::size_t line) {
        rewards.push_back(jsonl::require_number(record, "policy_logprob", line) -
                          jsonl::require_number(record, "ref_logprob", line));
      });
      z0 = kto::kl_reference_point(rewards);
      z0_source = "mismatched-pairs";
    }
    const double loss = kto::kto_loss(examples, z0, cfg.kto);
    Json audit;
    audit["examples"] = examples.size();
    audit["z0"] = z0;
    audit["z0_source"] = z0_source;
    audit["loss"] = loss;
    report["audit"] = std::move(audit);
    std::snprintf(buf, sizeof buf, "KTO loss over %zu examples (z0=%g): %.12g\n",
                  examples.size(), z0, loss);
    out << buf;
  }

  jsonl::write_text_file(args.out, report.dump(2) + "\n");
  manifest.finish(check.ok ? "ok" : "constraint-violated");
  manifest.write(sibling(args.out, ".manifest.json"));
  return check.ok ? kExitOk : kExitConfig;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream&) {
  RunManifest manifest = start_manifest("stats");
  manifest.config_digest = sha256_hex(dump_effective_config(ToolConfig{}));
  if (args.verdicts.empty()) throw ConfigError("stats needs at least one --verdicts");

  std::vector<std::pair<std::string, CorpusStats>> rows;
  Json rows_json = Json::array();
  for (const auto& [name, path] : args.verdicts) {
    manifest.add_input(path);
    const VerdictSet verdicts = load_verdicts(path);
    std::size_t unscorable = 0;
    for (const auto& [cname, cpath] : args.corpora) {
      if (cname != name) continue;
      manifest.add_input(cpath);
      const Corpus corpus = load_corpus(cpath, SplitTag::kOther);
      for (const auto& [id, v] : verdicts) {
        if (!corpus.find(id)) {
          throw InputError("verdict for entry `" + id + "` not in corpus " +
                           cpath.string());
        }
      }
      unscorable = corpus.size() - verdicts.size();
    }
    CorpusStats stats = compute_stats(verdicts, unscorable);
    Json j;
    j["dataset"] = name;
    j.update(drc::to_json(stats));
    rows_json.push_back(std::move(j));
    rows.emplace_back(name, stats);
  }
  out << format_stats_table(rows);
  Json report;
  report["rows"] = std::move(rows_json);
  jsonl::write_text_file(args.out, report.dump(2) + "\n");
  manifest.finish("ok");
  manifest.write(sibling(args.out, ".manifest.json"));
  return kExitOk;
}

}  // namespace drc::cli
