#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drc/corpus.hpp"
#include "drc/error.hpp"

namespace drc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitInput = 3,
  kExitTransport = 4,
  kExitPartial = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

struct ScoreArgs {
  std::filesystem::path corpus;
  std::filesystem::path config;
  std::filesystem::path out;
  SplitTag split = SplitTag::kOther;
};

/// Writes one score line per (scorable entry, backend). Existing lines in
/// `out` are kept and not recomputed; the file is rewritten in corpus order
/// then backend order. Failures go to `<out>.errors.jsonl`.
int cmd_score(const ScoreArgs& args, std::ostream& log);

struct DistillArgs {
  std::filesystem::path corpus;
  std::filesystem::path scores;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> config;
  SplitTag split = SplitTag::kOther;
};

/// Writes verdicts.jsonl, sft.jsonl, kto.jsonl, stats.json, stats.txt,
/// metadata.json and manifest.json into out_dir.
int cmd_distill(const DistillArgs& args, std::ostream& out, std::ostream& log);

enum class Baseline { kNone, kTenLine, kLlmJudge };

struct EvalIdentificationArgs {
  std::filesystem::path annotations;
  std::optional<std::filesystem::path> verdicts;
  Baseline baseline = Baseline::kNone;
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> config;
  std::optional<std::string> judge_backend;
  std::optional<std::filesystem::path> second_annotations;
  std::string method_name;
  std::filesystem::path out;
};

int cmd_eval_identification(const EvalIdentificationArgs& args, std::ostream& out,
                            std::ostream& log);

struct EvalGenerationArgs {
  std::filesystem::path candidates;
  std::filesystem::path references;
  std::filesystem::path out;
};

/// Files ending in .jsonl hold {"entry_id","text"} records matched by id;
/// anything else is one text per line matched by position.
int cmd_eval_generation(const EvalGenerationArgs& args, std::ostream& out,
                        std::ostream& log);

struct KtoCheckArgs {
  std::filesystem::path kto_file;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> logprobs;
  std::optional<double> z0;
  std::optional<std::filesystem::path> mismatched;
  std::filesystem::path out;
};

/// Exit 0 when the lambda constraint holds, kExitConfig when it does not.
int cmd_kto_check(const KtoCheckArgs& args, std::ostream& out, std::ostream& log);

struct StatsArgs {
  /// (row name, verdicts path)
  std::vector<std::pair<std::string, std::filesystem::path>> verdicts;
  /// (row name, corpus path) used to count unscorable entries.
  std::vector<std::pair<std::string, std::filesystem::path>> corpora;
  std::filesystem::path out;
};

int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& log);

}  // namespace drc::cli
