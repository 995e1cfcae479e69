#pragma once

// MCQA dataset builder. Each surviving (page, paragraph) pair becomes one
// example: the paragraph, masked against its option set, is the question and
// the page title is the correct option.
//
// Dataset line schema (UTF-8 JSON, one example per line):
//   {"id": str, "question": str, "options": [str], "correct_index": int,
//    "provenance": {"doc_id": str, "paragraph_index": int (-1 = whole page),
//                   "paragraph": str, "strategy": str, "seed": uint64,
//                   "example_id": str, "option_provenance": [str],
//                   "mask_plan": {"spans": [{"start", "end", "unit", "hidden",
//                                            "p": "n/d", "coin"}],
//                                 "candidates": [{"word", "k", "p", "coin"}]}}}

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/distractors.hpp"
#include "forge/error.hpp"
#include "forge/masking.hpp"
#include "forge/parallel.hpp"
#include "forge/retrieval.hpp"
#include "forge/tokenizer.hpp"

namespace forge::gen {

struct Provenance {
  std::string doc_id;
  std::int64_t paragraph_index = 0;  // -1 when the whole page is the question
  std::string paragraph;             // unmasked text the plan's offsets refer to
  mask::Strategy strategy = mask::Strategy::word_naive;
  mask::SeedMaterial seed_material;
  mask::MaskPlan plan;
  std::vector<distract::OptionSource> option_provenance;

  bool operator==(const Provenance&) const = default;
};

struct MCQAExample {
  std::string id;
  std::string question;
  std::vector<std::string> options;
  std::size_t correct_index = 0;
  Provenance provenance;

  bool operator==(const MCQAExample&) const = default;
};

struct GenConfig {
  mask::Strategy strategy = mask::Strategy::prob_matching;
  std::size_t n_distractors = 7;
  std::size_t min_words = corpus::kDefaultMinWords;
  std::uint64_t seed = 0;
  std::string sentinel = std::string(mask::kDefaultSentinel);
  distract::QueryMode query = distract::QueryMode::title_lead;
  bool per_page = false;
};

/// "<doc id>:<paragraph index>", or "<doc id>:page" for whole-page examples.
std::string example_id(const std::string& doc_id, std::int64_t paragraph_index);

/// Masks `paragraph` against the option set. `vocab` is needed only for
/// token masking. Masking errors propagate.
MCQAExample generate_example(const corpus::DocRecord& doc, std::int64_t paragraph_index,
                             const std::string& paragraph, const distract::OptionSet& options,
                             const GenConfig& config, const tok::SubwordVocab* vocab = nullptr);

/// Checks MCQAExample invariants; empty string when valid.
std::string check_example(const MCQAExample& example, std::string_view sentinel = mask::kDefaultSentinel);

struct GenerationInputs {
  const std::vector<corpus::DocRecord>& records;
  const distract::DiffDxGraph& diffdx;
  const retrieval::Bm25Index& index;
  const tok::SubwordVocab* vocab = nullptr;
};

struct RunReport {
  corpus::CorpusStats corpus;
  std::size_t pairs_in = 0;
  std::size_t examples_out = 0;
  std::map<std::string, std::size_t> skipped;  // error kind -> count

  bool operator==(const RunReport& o) const {
    return corpus.records_in == o.corpus.records_in && corpus.records_kept == o.corpus.records_kept &&
           corpus.paragraphs_kept == o.corpus.paragraphs_kept &&
           corpus.dropped_by_rule == o.corpus.dropped_by_rule && pairs_in == o.pairs_in &&
           examples_out == o.examples_out && skipped == o.skipped;
  }
};

struct Dataset {
  std::vector<MCQAExample> examples;
  RunReport report;
};

/// Parallel over pages (distractor retrieval) and then over pairs (option
/// assembly and masking). Output order is input order for every thread
/// count. Per-example failures are skipped and counted.
Dataset generate_dataset(const GenerationInputs& inputs, const GenConfig& config, Threads threads = {});

/// Single-threaded reference for generate_dataset.
Dataset generate_dataset_serial(const GenerationInputs& inputs, const GenConfig& config);

std::string serialize_example(const MCQAExample& example);
void write_dataset(std::ostream& out, const std::vector<MCQAExample>& examples);
void write_dataset_file(const std::string& path, const std::vector<MCQAExample>& examples);

struct DatasetReadResult {
  std::vector<MCQAExample> examples;
  std::vector<LineIssue> errors;
};

DatasetReadResult read_dataset(std::istream& in);
DatasetReadResult read_dataset_file(const std::string& path);

}  // namespace forge::gen
