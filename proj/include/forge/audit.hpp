#pragma once

// Leakage audit for masked MCQA datasets.
//
// The adversary is a linear softmax-over-options classifier on four surface
// features per option: how many of the option's word types appear unmasked in
// the question, how many do not, the option's word-type count, and the number
// of mask sentinels in the question. Anything it learns beyond chance is a
// cue that reveals the answer without domain knowledge.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/generator.hpp"
#include "forge/parallel.hpp"

namespace forge::audit {

inline constexpr std::size_t kFeatureDim = 4;
using FeatureVector = std::array<double, kFeatureDim>;

struct OptionFeatures {
  std::size_t unmasked_overlap = 0;
  std::size_t absent = 0;
  std::size_t opt_len = 0;

  bool operator==(const OptionFeatures&) const = default;
};

struct CueFeatures {
  std::vector<OptionFeatures> options;
  std::size_t mask_count = 0;
  std::size_t correct_index = 0;

  /// [unmasked_overlap, absent, opt_len, mask_count] for option i.
  FeatureVector vector(std::size_t i) const;
};

/// Normalized words of the question outside sentinel occurrences.
std::set<std::string> unmasked_words(std::string_view question, std::string_view sentinel);
std::size_t count_sentinels(std::string_view question, std::string_view sentinel);

CueFeatures extract_cue_features(const gen::MCQAExample& example,
                                 std::string_view sentinel = mask::kDefaultSentinel);

std::vector<CueFeatures> extract_features_batch(std::span<const gen::MCQAExample> examples,
                                                std::string_view sentinel, Threads threads = {});
std::vector<CueFeatures> extract_features_batch_serial(std::span<const gen::MCQAExample> examples,
                                                       std::string_view sentinel);

struct CueClassifier {
  FeatureVector weights{};
  double bias = 0.0;
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;

  double score(const CueFeatures& f, std::size_t option) const;
  /// Softmax over options.
  std::vector<double> probabilities(const CueFeatures& f) const;
};

/// Parameters flattened as [w0, w1, w2, w3, bias].
using Params = std::array<double, kFeatureDim + 1>;

Params params_of(const CueClassifier& c);
void set_params(CueClassifier& c, const Params& p);

/// Mean negative log-likelihood of the correct options.
double log_loss(const Params& params, std::span<const CueFeatures> data);
/// Analytic gradient of log_loss.
Params log_loss_gradient(const Params& params, std::span<const CueFeatures> data);

/// Full-batch gradient descent from zero weights. Throws ValidationError with
/// fewer than two examples or an example with fewer than two options.
CueClassifier train_cue_classifier(std::span<const CueFeatures> train, std::size_t epochs, double learning_rate,
                                   std::uint64_t seed);

/// Accuracy with ties among top-scoring options broken uniformly at random,
/// counted in expectation.
double accuracy(const CueClassifier& c, std::span<const CueFeatures> data);

/// The same expected accuracy for the rule "pick the option with the smallest
/// unmasked overlap".
double min_overlap_rule_accuracy(std::span<const CueFeatures> data);

struct ExtraneousStats {
  std::size_t examples = 0;
  std::size_t masked_spans = 0;
  std::size_t masked_punctuation = 0;
  std::size_t masked_high_frequency = 0;  // spans inside a top-decile word

  std::size_t extraneous() const { return masked_punctuation + masked_high_frequency; }
  bool operator==(const ExtraneousStats&) const = default;
};

/// Top decile of word types by document frequency over the distinct source
/// paragraphs (ties ordered by word).
std::set<std::string> high_frequency_words(std::span<const gen::MCQAExample> examples);

/// Per-strategy masking artifacts. A masked span counts as punctuation when it
/// covers a punctuation span of the source paragraph, and as high-frequency
/// when it lies inside a word from `high_frequency`.
std::map<mask::Strategy, ExtraneousStats> extraneous_stats(std::span<const gen::MCQAExample> examples,
                                                           const std::set<std::string>& high_frequency);

struct AuditConfig {
  double split = 0.8;
  std::size_t epochs = 500;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::string sentinel = std::string(mask::kDefaultSentinel);
};

inline constexpr std::size_t kMinEvalExamples = 50;

struct AuditReport {
  double accuracy = 0.0;
  double chance = 0.0;
  double min_overlap_rule_accuracy = 0.0;
  std::size_t n_train = 0;
  std::size_t n_eval = 0;
  CueClassifier classifier;
  std::map<mask::Strategy, ExtraneousStats> extraneous;
  std::size_t high_frequency_words = 0;
};

/// True when the example lands in the training split.
bool in_train_split(const std::string& example_id, double split, std::uint64_t seed);

/// Throws ValidationError if the evaluation split has fewer than 50 examples.
AuditReport audit_dataset(std::span<const gen::MCQAExample> examples, const AuditConfig& config,
                          Threads threads = {});

/// JSON report with every field, headed by a description of the adversary.
void write_report(std::ostream& out, const AuditReport& report, const AuditConfig& config);

}  // namespace forge::audit
