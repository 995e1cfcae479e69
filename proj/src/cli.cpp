#include "forge/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/audit.hpp"
#include "forge/corpus.hpp"
#include "forge/distractors.hpp"
#include "forge/generator.hpp"
#include "forge/retrieval.hpp"
#include "forge/tokenizer.hpp"

namespace forge::cli {

using nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void write_json_file(const std::string& path, const ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

void report_issues(std::ostream& err, const std::string& what, const std::vector<LineIssue>& issues) {
  for (const auto& issue : issues) err << what << ": " << to_string(issue) << '\n';
}

ordered_json issues_json(const std::vector<LineIssue>& issues) {
  ordered_json arr = ordered_json::array();
  for (const auto& i : issues) arr.push_back({{"line", i.line}, {"message", i.message}});
  return arr;
}

ordered_json stats_json(const corpus::CorpusStats& s) {
  ordered_json dropped = ordered_json::object();
  for (const auto& [rule, n] : s.dropped_by_rule) dropped[rule] = n;
  return {{"records_in", s.records_in},
          {"records_kept", s.records_kept},
          {"paragraphs_kept", s.paragraphs_kept},
          {"dropped_by_rule", std::move(dropped)}};
}

// Resolved configuration goes to the diagnostic stream with the thread count;
// report files get the same object without it so they stay byte-identical
// across --threads values.
void announce(std::ostream& err, const std::string& command, const ordered_json& config, int threads) {
  ordered_json shown = config;
  if (threads >= 0) shown["threads"] = threads;
  err << "forge " << command << " config: " << shown.dump() << '\n';
}

std::vector<corpus::DocRecord> load_corpus(const std::string& path, std::ostream& err) {
  auto parsed = corpus::parse_records_file(path);
  report_issues(err, path, parsed.errors);
  return std::move(parsed.records);
}

distract::DiffDxGraph load_graph(const std::string& path, bool symmetrize, std::ostream& err) {
  auto loaded = distract::load_diffdx_file(path);
  report_issues(err, path, loaded.errors);
  if (loaded.self_edges_dropped)
    err << path << ": dropped " << loaded.self_edges_dropped << " self-edge(s)\n";
  return symmetrize ? loaded.graph.symmetrized() : std::move(loaded.graph);
}

struct Options {
  // shared
  int threads = 0;
  std::uint64_t seed = 0;
  std::string sentinel = std::string(mask::kDefaultSentinel);
  std::string query = "title+lead";
  bool symmetrize = false;
  std::size_t min_words = corpus::kDefaultMinWords;

  std::string in, out, stats, report, corpus, diffdx, index, vocab, vectors;
  double k1 = 1.2, b = 0.75;
  std::string granularity = "paragraph";
  std::size_t n = 7;
  std::string masking = "prob";
  bool per_page = false;
  double split = 0.8;
  std::size_t epochs = 500;
  double lr = 0.1;
  std::size_t k = 0;
  std::size_t max_words = 256;
  std::string ranker = "bm25";
};

int cmd_ingest(const Options& o, std::ostream& err) {
  ordered_json config{{"command", "ingest"}, {"in", o.in}, {"out", o.out}, {"min_words", o.min_words},
                      {"stats", o.stats}};
  announce(err, "ingest", config, -1);
  auto parsed = corpus::parse_records_file(o.in);
  report_issues(err, o.in, parsed.errors);
  auto filtered = corpus::filter_records(parsed.records, {true, true, true, o.min_words});
  {
    auto out = open_out(o.out);
    corpus::write_records(out, filtered.records);
    if (!out) throw IoError("failed writing '" + o.out + "'");
  }
  if (!o.stats.empty()) {
    ordered_json doc{{"config", config}, {"stats", stats_json(filtered.stats)},
                     {"parse_errors", issues_json(parsed.errors)}};
    write_json_file(o.stats, doc);
  }
  return kExitOk;
}

int cmd_index(const Options& o, std::ostream& err) {
  ordered_json config{{"command", "index"}, {"in", o.in},  {"out", o.out},
                      {"k1", o.k1},         {"b", o.b},    {"granularity", o.granularity}};
  announce(err, "index", config, -1);
  auto granularity = retrieval::parse_granularity(o.granularity);
  auto records = load_corpus(o.in, err);
  auto index = retrieval::build_index(retrieval::docs_from_records(records, granularity), {o.k1, o.b});
  retrieval::save_index_file(index, o.out);
  return kExitOk;
}

int cmd_distract(const Options& o, std::ostream& err) {
  ordered_json config{{"command", "distract"}, {"corpus", o.corpus}, {"diffdx", o.diffdx},
                      {"index", o.index},      {"n", o.n},           {"seed", o.seed},
                      {"query", o.query},      {"symmetrize", o.symmetrize},
                      {"min_words", o.min_words}, {"out", o.out}};
  announce(err, "distract", config, o.threads);
  auto mode = distract::parse_query_mode(o.query);
  if (o.n == 0) throw ValidationError("--n must be at least 1");
  auto records = load_corpus(o.corpus, err);
  auto filtered = corpus::filter_records(records, {true, true, true, o.min_words});
  auto graph = load_graph(o.diffdx, o.symmetrize, err);
  auto index = retrieval::load_index_file(o.index);

  const auto& recs = filtered.records;
  std::vector<std::optional<distract::OptionSet>> sets(recs.size());
  parallel_for(recs.size(), {o.threads}, [&](std::size_t i) {
    const auto& rec = recs[i];
    const std::size_t m = o.n + graph.lookup(rec.title).size();
    const std::string lead = rec.paragraphs.empty() ? std::string() : rec.paragraphs.front();
    auto retrieved = distract::retrieve_distractors(rec.title, lead, index, m, {rec.id, {}}, mode);
    try {
      sets[i] = distract::assemble_options(rec.title, graph, retrieved, o.n, {o.seed, rec.id});
    } catch (const distract::DistractorShortfall&) {
    }
  });

  std::size_t written = 0, skipped = 0;
  auto out = open_out(o.out);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!sets[i]) {
      ++skipped;
      err << "distract: skipped '" << recs[i].title << "': insufficient distractors\n";
      continue;
    }
    ordered_json prov = ordered_json::array();
    for (auto s : sets[i]->provenance) prov.push_back(std::string(distract::to_string(s)));
    ordered_json line{{"doc_id", recs[i].id},
                      {"title", recs[i].title},
                      {"options", sets[i]->options},
                      {"correct_index", sets[i]->correct_index},
                      {"option_provenance", std::move(prov)}};
    out << line.dump() << '\n';
    ++written;
  }
  if (!out) throw IoError("failed writing '" + o.out + "'");
  if (!o.report.empty())
    write_json_file(o.report, {{"config", config}, {"pages", recs.size()}, {"written", written}, {"skipped", skipped}});
  return kExitOk;
}

int cmd_generate(const Options& o, std::ostream& err) {
  ordered_json config{{"command", "generate"}, {"corpus", o.corpus},     {"diffdx", o.diffdx},
                      {"index", o.index},      {"masking", o.masking},   {"n", o.n},
                      {"seed", o.seed},        {"min_words", o.min_words}, {"vocab", o.vocab},
                      {"mask_sentinel", o.sentinel}, {"query", o.query}, {"symmetrize", o.symmetrize},
                      {"per_page", o.per_page}, {"out", o.out}};
  announce(err, "generate", config, o.threads);

  gen::GenConfig gc;
  gc.strategy = mask::parse_strategy(o.masking);
  gc.n_distractors = o.n;
  gc.min_words = o.min_words;
  gc.seed = o.seed;
  gc.sentinel = o.sentinel;
  gc.query = distract::parse_query_mode(o.query);
  gc.per_page = o.per_page;
  if (gc.n_distractors == 0) throw ValidationError("--n must be at least 1");
  if (gc.min_words == 0) throw ValidationError("--min-words must be at least 1");
  if (gc.sentinel.empty()) throw ValidationError("--mask-sentinel must be non-empty");

  std::optional<tok::SubwordVocab> vocab;
  if (!o.vocab.empty()) {
    vocab = tok::SubwordVocab::load_file(o.vocab);
  } else if (gc.strategy == mask::Strategy::token_naive) {
    throw ValidationError("--masking token requires --vocab");
  }

  auto records = load_corpus(o.corpus, err);
  auto graph = load_graph(o.diffdx, o.symmetrize, err);
  auto index = retrieval::load_index_file(o.index);
  gen::GenerationInputs inputs{records, graph, index, vocab ? &*vocab : nullptr};
  auto dataset = gen::generate_dataset(inputs, gc, {o.threads});
  gen::write_dataset_file(o.out, dataset.examples);

  const auto& r = dataset.report;
  err << "generate: " << r.examples_out << " examples from " << r.pairs_in << " paragraphs\n";
  if (!o.report.empty()) {
    ordered_json skipped = ordered_json::object();
    for (const auto& [kind, n] : r.skipped) skipped[kind] = n;
    write_json_file(o.report, {{"config", config},
                               {"corpus", stats_json(r.corpus)},
                               {"pairs_in", r.pairs_in},
                               {"examples_out", r.examples_out},
                               {"skipped", std::move(skipped)}});
  }
  return kExitOk;
}

std::vector<gen::MCQAExample> load_dataset(const std::string& path, std::ostream& err) {
  auto read = gen::read_dataset_file(path);
  report_issues(err, path, read.errors);
  if (!read.errors.empty())
    throw ValidationError(path + ": " + std::to_string(read.errors.size()) + " malformed record(s)");
  return std::move(read.examples);
}

int cmd_audit(const Options& o, std::ostream& err) {
  ordered_json config{{"command", "audit"}, {"in", o.in},     {"split", o.split},
                      {"epochs", o.epochs}, {"lr", o.lr},     {"seed", o.seed},
                      {"mask_sentinel", o.sentinel}, {"report", o.report}};
  announce(err, "audit", config, o.threads);
  auto examples = load_dataset(o.in, err);
  audit::AuditConfig ac{o.split, o.epochs, o.lr, o.seed, o.sentinel};
  auto report = audit::audit_dataset(examples, ac, {o.threads});
  err << "audit: accuracy " << report.accuracy << " vs chance " << report.chance << " on " << report.n_eval
      << " held-out examples\n";
  auto out = open_out(o.report);
  audit::write_report(out, report, ac);
  if (!out) throw IoError("failed writing '" + o.report + "'");
  return kExitOk;
}

int cmd_eval_retrieval(const Options& o, std::ostream& err) {
  const std::size_t k = o.k ? o.k : 3;
  ordered_json config{{"command", "eval-retrieval"}, {"diffdx", o.diffdx}, {"index", o.index},
                      {"vectors", o.vectors},        {"ranker", o.ranker}, {"k", k},
                      {"query", o.query},            {"seed", o.seed},     {"symmetrize", o.symmetrize},
                      {"report", o.report}};
  announce(err, "eval-retrieval", config, -1);
  auto graph = load_graph(o.diffdx, o.symmetrize, err);

  std::optional<retrieval::Bm25Index> index;
  std::optional<retrieval::DenseVectors> vectors;
  distract::Ranker ranker;
  if (o.ranker == "bm25") {
    if (o.index.empty()) throw ValidationError("--ranker bm25 requires --index");
    index = retrieval::load_index_file(o.index);
    ranker = distract::make_bm25_ranker(*index, distract::parse_query_mode(o.query), k);
  } else if (o.ranker == "random") {
    ranker = distract::make_random_ranker(graph.titles(), o.seed, k);
  } else if (o.ranker == "dense") {
    if (o.vectors.empty()) throw ValidationError("--ranker dense requires --vectors");
    vectors = retrieval::load_dense_vectors_file(o.vectors);
    ranker = distract::make_dense_ranker(*vectors, k);
  } else {
    throw ValidationError("unknown ranker '" + o.ranker + "'");
  }
  auto report = distract::eval_retrieval(graph, ranker, k);
  err << "eval-retrieval: precision@" << k << " " << to_double(report.precision_at_k) << ", recall@" << k << " "
      << to_double(report.recall_at_k) << " over " << report.queries_evaluated << " queries\n";
  write_json_file(o.report, {{"config", config},
                             {"k", report.k},
                             {"queries_evaluated", report.queries_evaluated},
                             {"edges", graph.size()},
                             {"precision_at_k", to_string(report.precision_at_k)},
                             {"recall_at_k", to_string(report.recall_at_k)},
                             {"precision_at_k_value", to_double(report.precision_at_k)},
                             {"recall_at_k_value", to_double(report.recall_at_k)}});
  return kExitOk;
}

int cmd_augment(const Options& o, std::ostream& err) {
  const std::size_t k = o.k ? o.k : 10;
  ordered_json config{{"command", "augment"}, {"index", o.index}, {"in", o.in}, {"k", k},
                      {"max_words", o.max_words}, {"mask_sentinel", o.sentinel}, {"out", o.out}};
  announce(err, "augment", config, o.threads);
  auto index = retrieval::load_index_file(o.index);
  auto examples = load_dataset(o.in, err);
  std::vector<std::string> errors(examples.size());
  parallel_for(examples.size(), {o.threads}, [&](std::size_t i) {
    try {
      examples[i].question = retrieval::augment_question(examples[i].question, index, k, o.max_words, o.sentinel);
    } catch (const ValidationError& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw ValidationError("example '" + examples[i].id + "': " + errors[i]);
  gen::write_dataset_file(o.out, examples);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"forge: MCQA dataset synthesis and leakage auditing", "forge"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("forge ") + kToolVersion + " (corpus format " + std::to_string(kCorpusFormatVersion) +
                           ", index format " + std::string(retrieval::kIndexFormat) + " v" +
                           std::to_string(retrieval::kIndexVersion) + ", dataset format " +
                           std::to_string(kDatasetFormatVersion) + ")");

  Options o;
  auto threads = [&](CLI::App* c) {
    c->add_option("--threads", o.threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);
  };
  auto sentinel = [&](CLI::App* c) { c->add_option("--mask-sentinel", o.sentinel, "Mask sentinel string"); };

  auto* ingest = app.add_subcommand("ingest", "Validate and filter a page-record file");
  ingest->add_option("--in", o.in, "Input record file")->required();
  ingest->add_option("--out", o.out, "Filtered record file")->required();
  ingest->add_option("--min-words", o.min_words, "Minimum paragraph length in words");
  ingest->add_option("--stats", o.stats, "Corpus statistics file");

  auto* index = app.add_subcommand("index", "Build a BM25 index over a record file");
  index->add_option("--in", o.in, "Record file")->required();
  index->add_option("--out", o.out, "Index file")->required();
  index->add_option("--k1", o.k1, "BM25 k1");
  index->add_option("--b", o.b, "BM25 b");
  index->add_option("--granularity", o.granularity, "paragraph or article")
      ->check(CLI::IsMember({"paragraph", "article"}));

  auto* distract_cmd = app.add_subcommand("distract", "Assemble option sets per page");
  distract_cmd->add_option("--corpus", o.corpus, "Record file")->required();
  distract_cmd->add_option("--diffdx", o.diffdx, "Differential-diagnosis file")->required();
  distract_cmd->add_option("--index", o.index, "Index file")->required();
  distract_cmd->add_option("--n", o.n, "Distractors per question");
  distract_cmd->add_option("--seed", o.seed, "Shuffle seed")->required();
  distract_cmd->add_option("--out", o.out, "Option-set file")->required();
  distract_cmd->add_option("--report", o.report, "Run report file");
  distract_cmd->add_option("--min-words", o.min_words, "Minimum paragraph length in words");
  distract_cmd->add_option("--query", o.query, "title or title+lead")->check(CLI::IsMember({"title", "title+lead"}));
  distract_cmd->add_flag("--symmetrize", o.symmetrize, "Add reverse diffdx edges");
  threads(distract_cmd);

  auto* generate = app.add_subcommand("generate", "Generate a masked MCQA dataset");
  generate->add_option("--corpus", o.corpus, "Record file")->required();
  generate->add_option("--diffdx", o.diffdx, "Differential-diagnosis file")->required();
  generate->add_option("--index", o.index, "Index file")->required();
  generate->add_option("--masking", o.masking, "token, word or prob")->check(CLI::IsMember({"token", "word", "prob"}));
  generate->add_option("--n", o.n, "Distractors per question");
  generate->add_option("--seed", o.seed, "Seed for option shuffles and mask coins")->required();
  generate->add_option("--out", o.out, "Dataset file")->required();
  generate->add_option("--report", o.report, "Run report file");
  generate->add_option("--vocab", o.vocab, "Subword vocab (required for token masking)");
  generate->add_option("--min-words", o.min_words, "Minimum paragraph length in words");
  generate->add_option("--query", o.query, "title or title+lead")->check(CLI::IsMember({"title", "title+lead"}));
  generate->add_flag("--symmetrize", o.symmetrize, "Add reverse diffdx edges");
  generate->add_flag("--per-page", o.per_page, "One example per page instead of per paragraph");
  sentinel(generate);
  threads(generate);

  auto* audit_cmd = app.add_subcommand("audit", "Measure answer leakage of a dataset");
  audit_cmd->add_option("--in", o.in, "Dataset file")->required();
  audit_cmd->add_option("--split", o.split, "Training fraction");
  audit_cmd->add_option("--epochs", o.epochs, "Gradient-descent epochs");
  audit_cmd->add_option("--lr", o.lr, "Learning rate");
  audit_cmd->add_option("--seed", o.seed, "Split seed");
  audit_cmd->add_option("--report", o.report, "Audit report file")->required();
  sentinel(audit_cmd);
  threads(audit_cmd);

  auto* eval = app.add_subcommand("eval-retrieval", "Score a distractor ranker against the diffdx graph");
  eval->add_option("--diffdx", o.diffdx, "Differential-diagnosis file")->required();
  eval->add_option("--index", o.index, "Index file (bm25 ranker)");
  eval->add_option("--vectors", o.vectors, "Dense vectors file (dense ranker)");
  eval->add_option("--ranker", o.ranker, "bm25, random or dense")->check(CLI::IsMember({"bm25", "random", "dense"}));
  eval->add_option("--k", o.k, "Cutoff (default 3)");
  eval->add_option("--query", o.query, "title or title+lead")->check(CLI::IsMember({"title", "title+lead"}));
  eval->add_option("--seed", o.seed, "Seed for the random ranker");
  eval->add_option("--report", o.report, "Metrics file")->required();
  eval->add_flag("--symmetrize", o.symmetrize, "Add reverse diffdx edges");

  auto* augment = app.add_subcommand("augment", "Append retrieved passages to each question");
  augment->add_option("--index", o.index, "Index file")->required();
  augment->add_option("--in", o.in, "Dataset file")->required();
  augment->add_option("--out", o.out, "Augmented dataset file")->required();
  augment->add_option("--k", o.k, "Passages per question (default 10)");
  augment->add_option("--max-words", o.max_words, "Word budget for question plus passages");
  sentinel(augment);
  threads(augment);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitValidation;
  }

  try {
    if (*ingest) return cmd_ingest(o, err);
    if (*index) return cmd_index(o, err);
    if (*distract_cmd) return cmd_distract(o, err);
    if (*generate) return cmd_generate(o, err);
    if (*audit_cmd) return cmd_audit(o, err);
    if (*eval) return cmd_eval_retrieval(o, err);
    if (*augment) return cmd_augment(o, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace forge::cli
