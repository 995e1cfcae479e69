#pragma once

// Cue masking of a question paragraph against its option set.
//
// Three strategies:
//   token_naive   - mask every subword token whose piece occurs in the
//                   correct option's tokenization
//   word_naive    - mask every word whose normalized form is a word of the
//                   correct option (punctuation is never masked)
//   prob_matching - for each word w of the correct option present in the
//                   question, mask all of its occurrences with probability
//                   1/k, where k is the number of options (correct one
//                   included) containing w
//
// prob_matching draws one coin per word type from a stream keyed by
// (seed, example id, w), so results do not depend on evaluation order.

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/rational.hpp"
#include "forge/tokenizer.hpp"

namespace forge::mask {

enum class Strategy { token_naive, word_naive, prob_matching };

/// "token_naive", "word_naive", "prob_matching".
std::string_view to_string(Strategy strategy);
/// Accepts file names above and the CLI short forms "token", "word", "prob".
Strategy parse_strategy(std::string_view name);

enum class Unit { word, token };

std::string_view to_string(Unit unit);
Unit parse_unit(std::string_view name);

inline constexpr std::string_view kDefaultSentinel = "[MASK]";

struct SeedMaterial {
  std::uint64_t seed = 0;
  std::string example_id;

  bool operator==(const SeedMaterial&) const = default;
};

struct MaskSpan {
  std::size_t start = 0;  // byte offsets into the original question
  std::size_t end = 0;
  Unit unit = Unit::word;
  std::string hidden;     // original surface
  Rational p_applied{1};
  bool coin = true;

  bool operator==(const MaskSpan&) const = default;
};

struct CandidateWord {
  std::string word;  // normalized
  std::int64_t k = 1;
  Rational p{1};
  bool coin = true;

  bool operator==(const CandidateWord&) const = default;
};

struct MaskPlan {
  Strategy strategy = Strategy::word_naive;
  std::vector<MaskSpan> spans;  // sorted by start, non-overlapping
  std::vector<CandidateWord> candidate_words;  // sorted by word
  SeedMaterial seed_material;

  bool operator==(const MaskPlan&) const = default;
};

struct MaskResult {
  std::string text;
  MaskPlan plan;
};

using WordSet = std::set<std::string>;

/// 1 / |{i : w in words(options[i])}|. Throws std::invalid_argument if no
/// option contains w.
Rational mask_probability(std::string_view word, std::span<const WordSet> option_words);
Rational mask_probability(std::string_view word, std::span<const std::string> options);

/// Replaces each span of `original` with `sentinel`. Spans must be sorted and
/// non-overlapping.
std::string splice(std::string_view original, std::span<const MaskSpan> spans,
                   std::string_view sentinel = kDefaultSentinel);

MaskResult mask_word_naive(std::string_view question, std::string_view correct_option,
                           std::string_view sentinel = kDefaultSentinel);

/// Throws tok::TokenizeError if the question or option cannot be tokenized.
MaskResult mask_token_naive(std::string_view question, std::string_view correct_option,
                            const tok::SubwordVocab& vocab,
                            std::string_view sentinel = kDefaultSentinel);

/// Throws std::invalid_argument if fewer than two options are given or
/// correct_index is out of range.
MaskResult mask_prob_matching(std::string_view question, std::span<const std::string> options,
                              std::size_t correct_index, const SeedMaterial& seed,
                              std::string_view sentinel = kDefaultSentinel);

/// Dispatches on `strategy`; `vocab` is required for token_naive.
MaskResult apply_strategy(Strategy strategy, std::string_view question,
                          std::span<const std::string> options, std::size_t correct_index,
                          const SeedMaterial& seed, const tok::SubwordVocab* vocab,
                          std::string_view sentinel = kDefaultSentinel);

}  // namespace forge::mask
