#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <vector>

#include "forge/audit.hpp"
#include "forge/generator.hpp"
#include "forge/parallel.hpp"

using namespace forge;

namespace {

struct Inputs {
  std::vector<corpus::DocRecord> records;
  distract::DiffDxGraph diffdx;
  retrieval::Bm25Index index;
  tok::SubwordVocab vocab;
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
    return i;
  }();
  return in;
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  for (int t : {1, 2, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), {t}, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("search kernel: parallel equals serial on fixture queries") {
  const Inputs& in = inputs();
  std::vector<std::string> queries;
  for (const auto& r : in.records) queries.push_back(r.title + " " + r.paragraphs.front());
  auto serial = retrieval::search_batch_serial(in.index, queries, 20);
  for (int t : {1, 2, 8}) CHECK(retrieval::search_batch(in.index, queries, 20, {t}) == serial);
}

TEST_CASE("generation kernel: parallel equals serial for every strategy") {
  const Inputs& in = inputs();
  gen::GenerationInputs gi{in.records, in.diffdx, in.index, &in.vocab};
  for (auto s : {mask::Strategy::token_naive, mask::Strategy::word_naive, mask::Strategy::prob_matching}) {
    gen::GenConfig cfg;
    cfg.strategy = s;
    cfg.seed = 21;
    auto serial = gen::generate_dataset_serial(gi, cfg);
    for (int t : {2, 8}) {
      auto par = gen::generate_dataset(gi, cfg, {t});
      CHECK(par.examples == serial.examples);
      CHECK(par.report == serial.report);
    }
  }
}

TEST_CASE("feature kernel and audit: thread count does not change results") {
  const Inputs& in = inputs();
  gen::GenConfig cfg;
  cfg.strategy = mask::Strategy::word_naive;
  cfg.seed = 21;
  auto ds = gen::generate_dataset({in.records, in.diffdx, in.index, &in.vocab}, cfg);
  auto serial = audit::extract_features_batch_serial(ds.examples, "[MASK]");
  for (int t : {2, 8}) {
    auto par = audit::extract_features_batch(ds.examples, "[MASK]", {t});
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i].options == serial[i].options);
  }
  auto a = audit::audit_dataset(ds.examples, {}, {1});
  auto b = audit::audit_dataset(ds.examples, {}, {8});
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.classifier.weights == b.classifier.weights);
  CHECK(a.extraneous == b.extraneous);
}
