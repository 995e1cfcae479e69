// Serial reference vs OpenMP kernels on the shipped fixture.
// Run: build/bench/bench_kernels [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "forge/audit.hpp"
#include "forge/generator.hpp"

using namespace forge;

namespace {

struct Inputs {
  std::vector<corpus::DocRecord> records;
  distract::DiffDxGraph diffdx;
  retrieval::Bm25Index index;
  tok::SubwordVocab vocab;
  std::vector<std::string> queries;
  std::vector<gen::MCQAExample> examples;
};

const Inputs& inputs() {
  static const Inputs in = [] {
    Inputs i;
    corpus::FilterRules rules;
    rules.min_words = corpus::kDefaultMinWords;
    i.records = corpus::filter_records(corpus::parse_records_file(FORGE_DATA_DIR "/fixture/corpus.jsonl").records,
                                       rules)
                    .records;
    i.diffdx = distract::load_diffdx_file(FORGE_DATA_DIR "/fixture/diffdx.tsv").graph;
    i.index = retrieval::build_index(retrieval::docs_from_records(i.records, retrieval::Granularity::paragraph));
    i.vocab = tok::SubwordVocab::load_file(FORGE_DATA_DIR "/fixture/vocab.txt");
    for (const auto& r : i.records)
      for (const auto& p : r.paragraphs) i.queries.push_back(p);
    gen::GenConfig cfg;
    cfg.strategy = mask::Strategy::prob_matching;
    cfg.seed = 1;
    i.examples = gen::generate_dataset({i.records, i.diffdx, i.index, &i.vocab}, cfg).examples;
    return i;
  }();
  return in;
}

gen::GenConfig token_config() {
  gen::GenConfig cfg;
  cfg.strategy = mask::Strategy::token_naive;
  cfg.seed = 1;
  return cfg;
}

void BM_SearchSerial(benchmark::State& state) {
  const auto& in = inputs();
  for (auto _ : state) benchmark::DoNotOptimize(retrieval::search_batch_serial(in.index, in.queries, 10));
}

void BM_SearchParallel(benchmark::State& state) {
  const auto& in = inputs();
  Threads t{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(retrieval::search_batch(in.index, in.queries, 10, t));
}

void BM_GenerateSerial(benchmark::State& state) {
  const auto& in = inputs();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        gen::generate_dataset_serial({in.records, in.diffdx, in.index, &in.vocab}, token_config()));
}

void BM_GenerateParallel(benchmark::State& state) {
  const auto& in = inputs();
  Threads t{static_cast<int>(state.range(0))};
  for (auto _ : state)
    benchmark::DoNotOptimize(gen::generate_dataset({in.records, in.diffdx, in.index, &in.vocab}, token_config(), t));
}

void BM_FeaturesSerial(benchmark::State& state) {
  const auto& in = inputs();
  for (auto _ : state) benchmark::DoNotOptimize(audit::extract_features_batch_serial(in.examples, "[MASK]"));
}

void BM_FeaturesParallel(benchmark::State& state) {
  const auto& in = inputs();
  Threads t{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(audit::extract_features_batch(in.examples, "[MASK]", t));
}

}  // namespace

BENCHMARK(BM_SearchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
