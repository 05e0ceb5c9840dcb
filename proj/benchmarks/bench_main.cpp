#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "polyseg/bpe.hpp"
#include "polyseg/crf.hpp"
#include "polyseg/morfessor.hpp"
#include "polyseg/mt_metrics.hpp"
#include "polyseg/significance.hpp"

using namespace polyseg;

namespace {

std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  static const std::string letters = "aeiknrstuwy";
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
  std::string w;
  for (std::size_t n = len(rng); n > 0; --n) w += letters[pick(rng)];
  return w;
}

WordCounts corpus(std::size_t types, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> count(1, 20);
  WordCounts out;
  while (out.size() < types) out[random_word(rng, 3, 12)] += count(rng);
  return out;
}

std::vector<std::string> sentences(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    for (int k = 0; k < 12; ++k) s += (k ? " " : "") + random_word(rng, 2, 4);
    out.push_back(s);
  }
  return out;
}

void BM_TrainBpe(benchmark::State& state) {
  const auto counts = corpus(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(train_bpe(counts, 2000));
}
BENCHMARK(BM_TrainBpe)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_EncodeBpe(benchmark::State& state) {
  const auto model = train_bpe(corpus(2000, 2), 1500);
  std::mt19937_64 rng(3);
  std::vector<std::string> words;
  for (int i = 0; i < 1000; ++i) words.push_back(random_word(rng, 3, 14));
  for (auto _ : state) {
    for (const auto& w : words) benchmark::DoNotOptimize(model.encode(w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_EncodeBpe);

void BM_TrainMorfessor(benchmark::State& state) {
  const auto counts = corpus(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(train_baseline(counts));
}
BENCHMARK(BM_TrainMorfessor)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Viterbi(benchmark::State& state) {
  const auto model = train_baseline(corpus(500, 5));
  std::mt19937_64 rng(6);
  std::vector<std::string> words;
  for (int i = 0; i < 500; ++i) words.push_back(random_word(rng, 4, 16));
  for (auto _ : state) {
    for (const auto& w : words) benchmark::DoNotOptimize(viterbi_segment(model, w));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_Viterbi);

void BM_TrainCrf(benchmark::State& state) {
  std::mt19937_64 rng(7);
  SegmentationDataset data;
  for (int i = 0; i < 300; ++i) {
    SegmentedWord w;
    for (int k = 0; k < 3; ++k) w.morphs.push_back(random_word(rng, 1, 4));
    for (const auto& m : w.morphs) w.surface += m;
    data.entries.push_back(std::move(w));
  }
  CrfOptions o;
  o.max_iterations = 50;
  for (auto _ : state) benchmark::DoNotOptimize(train_crf(data, o));
}
BENCHMARK(BM_TrainCrf)->Unit(benchmark::kMillisecond);

void BM_CorpusBleu(benchmark::State& state) {
  const auto hyps = sentences(1000, 8), refs = sentences(1000, 9);
  for (auto _ : state) benchmark::DoNotOptimize(corpus_bleu(hyps, refs));
}
BENCHMARK(BM_CorpusBleu)->Unit(benchmark::kMillisecond);

void BM_Signif(benchmark::State& state) {
  const auto a = sentences(1000, 10), b = sentences(1000, 11), r = sentences(1000, 12);
  SignifOptions o;
  o.trials = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(paired_randomization_test(MtMetric::bleu, a, b, r, o));
}
BENCHMARK(BM_Signif)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
