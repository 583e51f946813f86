#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "drc/version.hpp"

namespace {

using namespace drc;
using namespace drc::cli;

std::pair<std::string, std::filesystem::path> split_named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {"all", arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distill desired review comments from code-review corpora"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string score_split = "other";
  std::string distill_split = "other";
  const auto split_names = CLI::IsMember({"train", "test", "other"});

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Compute desiredness scores per backend");
  score_cmd->add_option("--corpus", score.corpus, "Corpus file (JSONL)")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--config", score.config, "Backends/config YAML")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", score.out, "Score file; existing lines are resumed")->required();
  score_cmd->add_option("--split", score_split, "Corpus split tag")->check(split_names);

  DistillArgs distill;
  auto* distill_cmd = app.add_subcommand("distill", "Consensus verdicts, SFT/KTO datasets and stats");
  distill_cmd->add_option("--corpus", distill.corpus)->required()->check(CLI::ExistingFile);
  distill_cmd->add_option("--scores", distill.scores)->required()->check(CLI::ExistingFile);
  distill_cmd->add_option("--out-dir", distill.out_dir)->required();
  distill_cmd->add_option("--config", distill.config, "Fixes the backend set and truncation limit")
      ->check(CLI::ExistingFile);
  distill_cmd->add_option("--split", distill_split, "Corpus split tag")->check(split_names);

  EvalIdentificationArgs ident;
  std::string baseline;
  auto* ident_cmd = app.add_subcommand("eval-identification", "Accuracy/precision/recall/F1 vs. human labels");
  ident_cmd->add_option("--annotations", ident.annotations, "Annotation file (JSONL)")->required();
  ident_cmd->add_option("--verdicts", ident.verdicts, "Verdicts from distill");
  ident_cmd->add_option("--baseline", baseline, "ten-line | llm-judge")
      ->check(CLI::IsMember({"ten-line", "llm-judge"}));
  ident_cmd->add_option("--corpus", ident.corpus, "Corpus (baselines)");
  ident_cmd->add_option("--config", ident.config, "Config with judge backend");
  ident_cmd->add_option("--judge-backend", ident.judge_backend, "Backend id for llm-judge");
  ident_cmd->add_option("--second-annotations", ident.second_annotations,
                        "Second annotator's labels for a chi-squared agreement test");
  ident_cmd->add_option("--method-name", ident.method_name, "Row label in the table");
  ident_cmd->add_option("--out", ident.out, "Report JSON")->required();

  EvalGenerationArgs gen;
  auto* gen_cmd = app.add_subcommand("eval-generation", "Mean sentence BLEU-4 of generated comments");
  gen_cmd->add_option("--candidates", gen.candidates)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--references", gen.references)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", gen.out)->required();

  KtoCheckArgs kto;
  auto* kto_cmd = app.add_subcommand("kto-check", "KTO lambda constraint and loss audit");
  kto_cmd->add_option("--kto-file", kto.kto_file, "kto.jsonl from distill")->required()->check(CLI::ExistingFile);
  kto_cmd->add_option("--config", kto.config)->check(CLI::ExistingFile);
  kto_cmd->add_option("--logprobs", kto.logprobs, "{policy_logprob, ref_logprob, label} lines")
      ->check(CLI::ExistingFile);
  auto* z0_opt = kto_cmd->add_option("--z0", kto.z0, "KL reference point");
  kto_cmd->add_option("--mismatched", kto.mismatched, "{policy_logprob, ref_logprob} on mismatched pairs")
      ->check(CLI::ExistingFile)->excludes(z0_opt);
  kto_cmd->add_option("--out", kto.out)->required();

  std::vector<std::string> stats_verdicts, stats_corpora;
  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Desired/undesired table from verdict files");
  stats_cmd->add_option("--verdicts", stats_verdicts, "[NAME=]PATH, repeatable")->required();
  stats_cmd->add_option("--corpus", stats_corpora, "[NAME=]PATH to count unscorable entries");
  stats_cmd->add_option("--out", stats.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*score_cmd) {
      score.split = parse_split_tag(score_split);
      return cmd_score(score, std::cerr);
    }
    if (*distill_cmd) {
      distill.split = parse_split_tag(distill_split);
      return cmd_distill(distill, std::cout, std::cerr);
    }
    if (*ident_cmd) {
      ident.baseline = baseline == "ten-line"    ? Baseline::kTenLine
                       : baseline == "llm-judge" ? Baseline::kLlmJudge
                                                 : Baseline::kNone;
      return cmd_eval_identification(ident, std::cout, std::cerr);
    }
    if (*gen_cmd) return cmd_eval_generation(gen, std::cout, std::cerr);
    if (*kto_cmd) return cmd_kto_check(kto, std::cout, std::cerr);
    if (*stats_cmd) {
      for (const auto& v : stats_verdicts) stats.verdicts.push_back(split_named(v));
      for (const auto& c : stats_corpora) stats.corpora.push_back(split_named(c));
      return cmd_stats(stats, std::cout, std::cerr);
    }
  } catch (const drc::Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
