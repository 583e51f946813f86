#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "drc/distill.hpp"
#include "drc/eval.hpp"
#include "drc/model_backend.hpp"
#include "drc/reference_model.hpp"
#include "drc/scoring.hpp"

namespace {

std::vector<double> random_logprobs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-10, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void BM_Perplexity(benchmark::State& state) {
  const auto v = random_logprobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(drc::perplexity(v));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Perplexity)->Arg(16)->Arg(256)->Arg(2048);

void BM_Median(benchmark::State& state) {
  const auto v = random_logprobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(drc::median(v));
}
BENCHMARK(BM_Median)->Arg(4)->Arg(9);

void BM_Bleu4(benchmark::State& state) {
  const std::string cand =
      "please check whether the pointer can be null before dereferencing it here";
  const std::string ref =
      "this pointer may be null, add a check before it is dereferenced";
  for (auto _ : state) benchmark::DoNotOptimize(drc::eval::bleu4(cand, ref));
}
BENCHMARK(BM_Bleu4);

void BM_ReferenceScore(benchmark::State& state) {
  const auto backend = drc::make_backend(drc::build_reference_backend(
      "def add(a, b):\n    return a + b\n\nfor i in range(10):\n    print(i)\n"));
  const std::string prompt(static_cast<std::size_t>(state.range(0)), 'p');
  const std::string fix = "    return a - b\n";
  for (auto _ : state) benchmark::DoNotOptimize(backend->score_completion(prompt, fix));
  state.SetBytesProcessed(state.iterations() * (state.range(0) + static_cast<long>(fix.size())));
}
BENCHMARK(BM_ReferenceScore)->Arg(128)->Arg(2048);

void BM_Desiredness(benchmark::State& state) {
  const auto backend = drc::make_backend(drc::build_reference_backend(
      "def add(a, b):\n    return a + b\n\nfor i in range(10):\n    print(i)\n"));
  drc::ReviewEntry e;
  e.entry_id = "b";
  e.language = "py";
  e.old_hunk = "x = 41\n";
  e.comment = "set x to 42";
  e.new_hunk = "x = 42\n";
  for (auto _ : state) benchmark::DoNotOptimize(drc::desiredness(e, *backend));
}
BENCHMARK(BM_Desiredness);

}  // namespace

BENCHMARK_MAIN();
