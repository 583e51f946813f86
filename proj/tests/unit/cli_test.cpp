#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "commands.hpp"
#include "drc/distill.hpp"
#include "drc/error.hpp"
#include "drc/jsonl.hpp"
#include "drc/kto.hpp"
#include "drc/scoring.hpp"
#include "httplib.h"
#include "support/fixtures.hpp"
#include "support/mock_server.hpp"

namespace drc::cli {
namespace {

using testing::read_text;
using testing::write_text;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    write_text(dir_ / "seed.txt", testing::kSeed);
    write_text(dir_ / "drc.yaml", testing::reference_config_yaml(dir_ / "seed.txt"));
  }

  std::filesystem::path write_corpus(const std::vector<ReviewEntry>& entries,
                                     const std::string& name = "corpus.jsonl") {
    write_text(dir_ / name, testing::corpus_jsonl(entries));
    return dir_ / name;
  }

  int score(const std::filesystem::path& corpus, const std::filesystem::path& out,
            const std::filesystem::path& config) {
    return cmd_score({corpus, config, out, SplitTag::kOther}, log_);
  }

  testing::TempDir dir_;
  std::ostringstream out_, log_;
};

TEST_F(CliTest, ScoreIsDeterministicAndResumable) {
  const auto corpus = write_corpus(testing::predictive_fixture());
  ASSERT_EQ(score(corpus, dir_ / "a.jsonl", dir_ / "drc.yaml"), kExitOk);
  ASSERT_EQ(score(corpus, dir_ / "b.jsonl", dir_ / "drc.yaml"), kExitOk);
  const auto a = read_text(dir_ / "a.jsonl");
  EXPECT_EQ(a, read_text(dir_ / "b.jsonl"));
  const auto scores = load_scores(dir_ / "a.jsonl");
  ASSERT_EQ(scores.size(), 6u);
  EXPECT_EQ(scores[0].entry_id, "p1");
  EXPECT_EQ(scores[5].entry_id, "u3");

  // rerun on complete output: no new work, identical bytes
  ASSERT_EQ(score(corpus, dir_ / "a.jsonl", dir_ / "drc.yaml"), kExitOk);
  EXPECT_EQ(read_text(dir_ / "a.jsonl"), a);
  const auto manifest = Json::parse(read_text(dir_ / "a.jsonl.manifest.json"));
  EXPECT_EQ(manifest["details"]["computed_scores"], 0);
  EXPECT_EQ(manifest["details"]["resumed_scores"], 6);
  EXPECT_EQ(manifest["command"], "score");
  EXPECT_EQ(manifest["input_digests"].size(), 2u);
  EXPECT_EQ(manifest["config_digest"].get<std::string>().size(), 64u);

  // interrupted run: drop the last two lines and tear the one before
  std::vector<std::string> lines;
  std::istringstream in(a);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::string partial;
  for (int i = 0; i < 3; ++i) partial += lines[i] + "\n";
  partial += lines[3].substr(0, 10);
  write_text(dir_ / "a.jsonl", partial);
  ASSERT_EQ(score(corpus, dir_ / "a.jsonl", dir_ / "drc.yaml"), kExitOk);
  EXPECT_EQ(read_text(dir_ / "a.jsonl"), a);
  const auto resumed = Json::parse(read_text(dir_ / "a.jsonl.manifest.json"));
  EXPECT_EQ(resumed["details"]["resumed_scores"], 3);
  EXPECT_EQ(resumed["details"]["computed_scores"], 3);
}

TEST_F(CliTest, UnscorableEntriesAreSkippedAndReported) {
  const auto corpus = write_corpus(testing::synthetic_corpus(20));
  ASSERT_EQ(score(corpus, dir_ / "s.jsonl", dir_ / "drc.yaml"), kExitOk);
  EXPECT_EQ(load_scores(dir_ / "s.jsonl").size(), 18u);
  const auto manifest = Json::parse(read_text(dir_ / "s.jsonl.manifest.json"));
  EXPECT_EQ(manifest["details"]["unscorable"], Json::array({"e009", "e019"}));
}

TEST_F(CliTest, UnreachableBackendExitsWithTransportCode) {
  const auto port = testing::unused_port();
  write_text(dir_ / "down.yaml", "backends:\n  - id: down\n    kind: http\n"
                                 "    endpoint: http://127.0.0.1:" +
                                     std::to_string(port) +
                                     "/v1/completions\n"
                                     "    retry_limit: 2\n    backoff_base_ms: 1\n"
                                     "    timeout_ms: 500\n");
  const auto corpus = write_corpus({testing::predictive_fixture()[0]});
  EXPECT_EQ(score(corpus, dir_ / "d.jsonl", dir_ / "down.yaml"), kExitTransport);
  EXPECT_EQ(read_text(dir_ / "d.jsonl"), "");
  const auto manifest = Json::parse(read_text(dir_ / "d.jsonl.manifest.json"));
  EXPECT_NE(manifest["status"], "ok");
  EXPECT_EQ(manifest["details"]["failures_by_kind"]["transport"], 1);
  const auto errors = read_text(dir_ / "d.jsonl.errors.jsonl");
  EXPECT_NE(errors.find("\"transport\""), std::string::npos);
}

TEST_F(CliTest, OtherFailuresArePartial) {
  // a fix longer than the truncation limit overflows; the rest still scores
  write_text(dir_ / "small.yaml", "truncation_limit: 12\nbackends:\n  - id: ref\n"
                                  "    kind: reference\n    seed_file: seed.txt\n");
  const auto corpus = write_corpus(
      {testing::make_entry("ok", "a\n", "c", "b\n"),
       testing::make_entry("long", "a\n", "c", std::string(40, 'z') + "\n")});
  EXPECT_EQ(score(corpus, dir_ / "p.jsonl", dir_ / "small.yaml"), kExitPartial);
  EXPECT_EQ(load_scores(dir_ / "p.jsonl").size(), 1u);
}

TEST_F(CliTest, BadConfigIsAConfigError) {
  write_text(dir_ / "bad.yaml", "backends: 3\n");
  const auto corpus = write_corpus(testing::predictive_fixture());
  EXPECT_THROW(score(corpus, dir_ / "x.jsonl", dir_ / "bad.yaml"), ConfigError);
  EXPECT_EQ(exit_code_for(ErrorKind::kConfig), kExitConfig);
  EXPECT_EQ(exit_code_for(ErrorKind::kInput), kExitInput);
  EXPECT_EQ(exit_code_for(ErrorKind::kTransport), kExitTransport);
}

TEST_F(CliTest, DistillWritesAllArtifacts) {
  const auto corpus = write_corpus(testing::synthetic_corpus(20));
  ASSERT_EQ(score(corpus, dir_ / "s.jsonl", dir_ / "drc.yaml"), kExitOk);
  DistillArgs args{corpus, dir_ / "s.jsonl", dir_ / "out", dir_ / "drc.yaml", SplitTag::kTrain};
  ASSERT_EQ(cmd_distill(args, out_, log_), kExitOk);
  const auto verdicts = load_verdicts(dir_ / "out" / "verdicts.jsonl");
  EXPECT_EQ(verdicts.size(), 18u);
  std::size_t desired = 0;
  for (const auto& [id, v] : verdicts) desired += v.verdict == Label::kDesired;

  std::size_t sft_lines = 0, kto_lines = 0;
  jsonl::read_file(dir_ / "out" / "sft.jsonl", [&](const Json& r, std::size_t) {
    ++sft_lines;
    EXPECT_TRUE(r.contains("instruction") && r.contains("input") && r.contains("output"));
  });
  jsonl::read_file(dir_ / "out" / "kto.jsonl", [&](const Json&, std::size_t) { ++kto_lines; });
  EXPECT_EQ(sft_lines, desired);
  EXPECT_EQ(kto_lines, 18u);
  const auto stats = Json::parse(read_text(dir_ / "out" / "stats.json"));
  EXPECT_EQ(stats["unscorable"], 2);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "stats.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "metadata.json"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "manifest.json"));
}

TEST_F(CliTest, DistillRejectsScoresForUnknownEntries) {
  const auto corpus = write_corpus(testing::predictive_fixture());
  write_text(dir_ / "s.jsonl",
             R"({"entry_id":"zz","backend_id":"ref","ppl_with":1.0,"ppl_without":2.0,"ds":1.0})"
             "\n");
  DistillArgs args{corpus, dir_ / "s.jsonl", dir_ / "out", dir_ / "drc.yaml", SplitTag::kOther};
  EXPECT_THROW(cmd_distill(args, out_, log_), InputError);
}

TEST_F(CliTest, DistillWithNoDesiredEntriesWarns) {
  const auto corpus = write_corpus({testing::make_entry("a", "x", "c", "y")});
  write_text(dir_ / "s.jsonl",
             R"({"entry_id":"a","backend_id":"ref","ppl_with":2.0,"ppl_without":1.0,"ds":-1.0})"
             "\n");
  DistillArgs args{corpus, dir_ / "s.jsonl", dir_ / "out", dir_ / "drc.yaml", SplitTag::kOther};
  ASSERT_EQ(cmd_distill(args, out_, log_), kExitOk);
  EXPECT_EQ(read_text(dir_ / "out" / "sft.jsonl"), "");
  EXPECT_NE(log_.str().find("warning"), std::string::npos) << log_.str();
}

void write_annotations(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, Label>>& labels) {
  std::string s;
  for (const auto& [id, l] : labels) {
    s += jsonl::dump(Json{{"entry_id", id}, {"label", to_string(l)}}) + "\n";
  }
  write_text(path, s);
}

void write_verdicts(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, double>>& ds) {
  std::string s;
  for (const auto& [id, d] : ds) {
    s += jsonl::dump(to_json(DesirednessVerdict{id, {{"ref", d}}, d, verdict_for(d)})) + "\n";
  }
  write_text(path, s);
}

// 600 labels with a planted confusion of tp=200, fp=50, fn=100, tn=250.
TEST_F(CliTest, EvalIdentificationKnownConfusion) {
  std::vector<std::pair<std::string, Label>> labels;
  std::vector<std::pair<std::string, double>> verdicts;
  for (int i = 0; i < 600; ++i) {
    const auto id = "e" + std::to_string(i);
    const bool truth = i < 200 || (i >= 250 && i < 350);
    const bool pred = i < 250;
    labels.emplace_back(id, truth ? Label::kDesired : Label::kUndesired);
    verdicts.emplace_back(id, pred ? 1.0 : -1.0);
  }
  write_annotations(dir_ / "labels.jsonl", labels);
  write_verdicts(dir_ / "verdicts.jsonl", verdicts);
  EvalIdentificationArgs args;
  args.annotations = dir_ / "labels.jsonl";
  args.verdicts = dir_ / "verdicts.jsonl";
  args.out = dir_ / "report.json";
  ASSERT_EQ(cmd_eval_identification(args, out_, log_), kExitOk);
  const auto r = Json::parse(read_text(dir_ / "report.json"));
  EXPECT_EQ(r["counts"]["tp"], 200);
  EXPECT_EQ(r["counts"]["fp"], 50);
  EXPECT_EQ(r["counts"]["fn"], 100);
  EXPECT_EQ(r["counts"]["tn"], 250);
  // accuracy 450/600, precision 200/250, recall 200/300, F1 2*.8*(2/3)/(.8+2/3)
  const std::string table = out_.str();
  for (const char* s : {"75.00", "80.00", "66.67", "72.73"}) {
    EXPECT_NE(table.find(s), std::string::npos) << s << "\n" << table;
  }
}

TEST_F(CliTest, EvalIdentificationTenLineBaseline) {
  const auto corpus = write_corpus(testing::predictive_fixture());
  std::vector<std::pair<std::string, Label>> labels;
  for (const auto& e : testing::predictive_fixture()) labels.emplace_back(e.entry_id, *e.human_label);
  write_annotations(dir_ / "labels.jsonl", labels);
  EvalIdentificationArgs args;
  args.annotations = dir_ / "labels.jsonl";
  args.baseline = Baseline::kTenLine;
  args.corpus = corpus;
  args.out = dir_ / "ten.json";
  ASSERT_EQ(cmd_eval_identification(args, out_, log_), kExitOk);
  const auto r = Json::parse(read_text(dir_ / "ten.json"));
  EXPECT_EQ(r["metrics"]["recall"], 100.0);  // reported in percent
  EXPECT_NE(out_.str().find("100.00"), std::string::npos);
}

TEST_F(CliTest, EvalIdentificationMissingAnnotations) {
  EvalIdentificationArgs args;
  args.annotations = dir_ / "nope.jsonl";
  args.verdicts = dir_ / "v.jsonl";
  args.out = dir_ / "r.json";
  EXPECT_THROW(cmd_eval_identification(args, out_, log_), InputError);
}

TEST_F(CliTest, EvalIdentificationAgreement) {
  std::vector<std::pair<std::string, Label>> a, b;
  for (int i = 0; i < 20; ++i) {
    const auto id = "e" + std::to_string(i);
    a.emplace_back(id, i < 10 ? Label::kDesired : Label::kUndesired);
    b.emplace_back(id, i < 10 ? Label::kDesired : Label::kUndesired);
  }
  write_annotations(dir_ / "a.jsonl", a);
  write_annotations(dir_ / "b.jsonl", b);
  write_verdicts(dir_ / "v.jsonl", {});
  std::vector<std::pair<std::string, double>> v;
  for (const auto& [id, l] : a) v.emplace_back(id, l == Label::kDesired ? 1.0 : -1.0);
  write_verdicts(dir_ / "v.jsonl", v);
  EvalIdentificationArgs args;
  args.annotations = dir_ / "a.jsonl";
  args.verdicts = dir_ / "v.jsonl";
  args.second_annotations = dir_ / "b.jsonl";
  args.out = dir_ / "r.json";
  ASSERT_EQ(cmd_eval_identification(args, out_, log_), kExitOk);
  const auto r = Json::parse(read_text(dir_ / "r.json"));
  EXPECT_EQ(r["agreement"]["statistic"], 20.0);
}

TEST_F(CliTest, EvalIdentificationJudgeErrorsArePartial) {
  testing::MockServer server([](const httplib::Request& req, httplib::Response& res) {
    const bool undecided = req.body.find("maybe") != std::string::npos;
    res.set_content(undecided ? R"({"choices":[{"text":"It depends"}]})"
                              : R"({"choices":[{"text":"True"}]})",
                    "application/json");
  });
  write_text(dir_ / "judge.yaml", "backends:\n  - id: judge\n    kind: http\n    endpoint: " +
                                      server.endpoint() + "\n");
  const auto corpus = write_corpus({testing::make_entry("a", "x = 1\n", "use 2", "x = 2\n"),
                                    testing::make_entry("b", "x = 1\n", "maybe", "x = 3\n")});
  write_annotations(dir_ / "labels.jsonl", {{"a", Label::kDesired}, {"b", Label::kDesired}});
  EvalIdentificationArgs args;
  args.annotations = dir_ / "labels.jsonl";
  args.baseline = Baseline::kLlmJudge;
  args.corpus = corpus;
  args.config = dir_ / "judge.yaml";
  args.out = dir_ / "j.json";
  EXPECT_EQ(cmd_eval_identification(args, out_, log_), kExitPartial);
  const auto r = Json::parse(read_text(dir_ / "j.json"));
  EXPECT_EQ(r["labeled"], 1);
  EXPECT_EQ(r["judge_errors"].size(), 1u);
  EXPECT_EQ(r["judge_errors"][0]["entry_id"], "b");
}

TEST_F(CliTest, EvalGeneration) {
  write_text(dir_ / "ref.txt", "the cat sat down\nalpha beta\n");
  write_text(dir_ / "same.txt", "the cat sat down\nalpha beta\n");
  write_text(dir_ / "disjoint.txt", "x y z\nq\n");
  write_text(dir_ / "golden.txt", "the cat sat\n");
  write_text(dir_ / "golden_ref.txt", "the cat sat down\n");
  auto run = [&](const char* cand, const char* ref) {
    EvalGenerationArgs args{dir_ / cand, dir_ / ref, dir_ / "g.json"};
    EXPECT_EQ(cmd_eval_generation(args, out_, log_), kExitOk);
    return Json::parse(read_text(dir_ / "g.json"))["bleu4"].get<double>();
  };
  EXPECT_DOUBLE_EQ(run("same.txt", "ref.txt"), 1.0);
  EXPECT_EQ(run("disjoint.txt", "ref.txt"), 0.0);
  EXPECT_NEAR(run("golden.txt", "golden_ref.txt"), 0.716531310573789, 1e-9);

  write_text(dir_ / "c.jsonl", "{\"entry_id\":\"b\",\"text\":\"x\"}\n{\"entry_id\":\"a\",\"text\":\"the cat\"}\n");
  write_text(dir_ / "r.jsonl", "{\"entry_id\":\"a\",\"text\":\"the cat\"}\n{\"entry_id\":\"b\",\"text\":\"x\"}\n");
  EXPECT_DOUBLE_EQ(run("c.jsonl", "r.jsonl"), 1.0);
  write_text(dir_ / "short.txt", "one\n");
  EvalGenerationArgs bad{dir_ / "short.txt", dir_ / "ref.txt", dir_ / "g.json"};
  EXPECT_THROW(cmd_eval_generation(bad, out_, log_), InputError);
}

void write_kto_file(const std::filesystem::path& path, std::size_t n_d, std::size_t n_u) {
  std::string s;
  for (std::size_t i = 0; i < n_d + n_u; ++i) {
    s += jsonl::dump(Json{{"prompt", "p"}, {"completion", "c"},
                          {"label", i < n_d ? "desired" : "undesired"}}) +
         "\n";
  }
  write_text(path, s);
}

TEST_F(CliTest, KtoCheck) {
  write_kto_file(dir_ / "kto.jsonl", 649, 854);
  KtoCheckArgs args;
  args.kto_file = dir_ / "kto.jsonl";
  args.out = dir_ / "k.json";
  ASSERT_EQ(cmd_kto_check(args, out_, log_), kExitOk);
  auto r = Json::parse(read_text(dir_ / "k.json"));
  EXPECT_NEAR(r["ratio"].get<double>(), 1.7 * 649 / 854, 1e-12);
  EXPECT_TRUE(r["ok"].get<bool>());

  write_text(dir_ / "l2.yaml", "kto: {lambda_desired: 2.0}\n");
  args.config = dir_ / "l2.yaml";
  out_.str("");
  EXPECT_EQ(cmd_kto_check(args, out_, log_), kExitConfig);
  EXPECT_NE(out_.str().find("lambda_desired"), std::string::npos) << out_.str();
  r = Json::parse(read_text(dir_ / "k.json"));
  EXPECT_FALSE(r["ok"].get<bool>());
}

TEST_F(CliTest, KtoCheckLossAuditMatchesLibrary) {
  write_kto_file(dir_ / "kto.jsonl", 3, 4);
  write_text(dir_ / "lp.jsonl",
             "{\"policy_logprob\":-3.5,\"ref_logprob\":-4,\"label\":\"desired\"}\n"
             "{\"policy_logprob\":-2,\"ref_logprob\":-1,\"label\":\"undesired\"}\n"
             "{\"policy_logprob\":-7,\"ref_logprob\":-9,\"label\":\"desired\"}\n");
  write_text(dir_ / "mm.jsonl",
             "{\"policy_logprob\":-5,\"ref_logprob\":-6}\n{\"policy_logprob\":-5,\"ref_logprob\":-5}\n");
  KtoCheckArgs args;
  args.kto_file = dir_ / "kto.jsonl";
  args.logprobs = dir_ / "lp.jsonl";
  args.mismatched = dir_ / "mm.jsonl";
  args.out = dir_ / "k.json";
  ASSERT_EQ(cmd_kto_check(args, out_, log_), kExitOk);
  const auto r = Json::parse(read_text(dir_ / "k.json"));
  const auto examples = kto::load_examples(dir_ / "lp.jsonl");
  const double expected = kto::kto_loss(examples, 0.5, kto::KtoConfig{});
  EXPECT_EQ(r["audit"]["loss"].get<double>(), expected);
  EXPECT_EQ(r["audit"]["z0"].get<double>(), 0.5);
}

TEST_F(CliTest, StatsReproducesPercentages) {
  std::vector<std::pair<std::string, double>> v;
  for (int i = 0; i < 43; ++i) v.emplace_back("d" + std::to_string(i), 1.0);
  for (int i = 0; i < 57; ++i) v.emplace_back("u" + std::to_string(i), -1.0);
  write_verdicts(dir_ / "v.jsonl", v);
  StatsArgs args;
  args.verdicts = {{"test", dir_ / "v.jsonl"}};
  args.out = dir_ / "stats.json";
  ASSERT_EQ(cmd_stats(args, out_, log_), kExitOk);
  const auto r = Json::parse(read_text(dir_ / "stats.json"));
  EXPECT_EQ(r["rows"][0]["desired_pct"], 43.0);
  EXPECT_EQ(r["rows"][0]["undesired_pct"], 57.0);
  EXPECT_NE(out_.str().find("43.00"), std::string::npos) << out_.str();
}

#ifdef DRC_CLI_PATH
TEST_F(CliTest, BinaryMapsErrorsToExitCodes) {
  auto run = [](const std::string& args) {
    const int status = std::system((std::string(DRC_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("--version"), 0);
  EXPECT_EQ(run("frobnicate"), kExitUsage);
  write_text(dir_ / "bad.yaml", "backends: 3\n");
  const auto corpus = write_corpus(testing::predictive_fixture());
  EXPECT_EQ(run("score --corpus " + corpus.string() + " --config " + (dir_ / "bad.yaml").string() +
                " --out " + (dir_ / "o.jsonl").string()),
            kExitConfig);
  write_text(dir_ / "broken.jsonl", "{not json\n");
  EXPECT_EQ(run("score --corpus " + (dir_ / "broken.jsonl").string() + " --config " +
                (dir_ / "drc.yaml").string() + " --out " + (dir_ / "o.jsonl").string()),
            kExitInput);
}
#endif

}  // namespace
}  // namespace drc::cli
