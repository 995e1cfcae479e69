#include "forge/masking.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "forge/error.hpp"
#include "forge/rng.hpp"

namespace forge::mask {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::token_naive: return "token_naive";
    case Strategy::word_naive: return "word_naive";
    case Strategy::prob_matching: return "prob_matching";
  }
  return "word_naive";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "token_naive" || name == "token") return Strategy::token_naive;
  if (name == "word_naive" || name == "word") return Strategy::word_naive;
  if (name == "prob_matching" || name == "prob") return Strategy::prob_matching;
  throw ValidationError("unknown masking strategy '" + std::string(name) + "'");
}

std::string_view to_string(Unit unit) { return unit == Unit::word ? "word" : "token"; }

Unit parse_unit(std::string_view name) {
  if (name == "word") return Unit::word;
  if (name == "token") return Unit::token;
  throw ValidationError("unknown mask unit '" + std::string(name) + "'");
}

Rational mask_probability(std::string_view word, std::span<const WordSet> option_words) {
  std::int64_t k = 0;
  const std::string key(word);
  for (const auto& words : option_words)
    if (words.count(key)) ++k;
  if (k == 0) throw std::invalid_argument("mask_probability: '" + key + "' is in no option");
  return Rational(1, k);
}

Rational mask_probability(std::string_view word, std::span<const std::string> options) {
  std::vector<WordSet> sets;
  sets.reserve(options.size());
  for (const auto& o : options) sets.push_back(tok::word_set(o));
  return mask_probability(word, sets);
}

std::string splice(std::string_view original, std::span<const MaskSpan> spans,
                   std::string_view sentinel) {
  std::string out;
  out.reserve(original.size());
  std::size_t cursor = 0;
  for (const auto& span : spans) {
    out.append(original.substr(cursor, span.start - cursor));
    out.append(sentinel);
    cursor = span.end;
  }
  out.append(original.substr(cursor));
  return out;
}

namespace {

// Word-level masking of every occurrence of the words in `coins` whose coin
// fired. Shared by word_naive and prob_matching.
MaskResult mask_words(std::string_view question, const std::vector<tok::WordSpan>& spans,
                      std::vector<CandidateWord> candidates, Strategy strategy,
                      SeedMaterial seed, std::string_view sentinel) {
  std::map<std::string_view, const CandidateWord*> by_word;
  for (const auto& c : candidates) by_word.emplace(c.word, &c);

  MaskResult result;
  result.plan.strategy = strategy;
  result.plan.seed_material = std::move(seed);
  for (const auto& span : spans) {
    if (span.kind != tok::SpanKind::word) continue;
    auto it = by_word.find(span.norm);
    if (it == by_word.end() || !it->second->coin) continue;
    result.plan.spans.push_back(
        {span.start, span.end, Unit::word, span.surface, it->second->p, true});
  }
  result.plan.candidate_words = std::move(candidates);
  result.text = splice(question, result.plan.spans, sentinel);
  return result;
}

// Correct-option words that occur in the question, sorted.
std::vector<std::string> present_words(const std::vector<tok::WordSpan>& spans,
                                       const WordSet& option_words) {
  WordSet present;
  for (const auto& span : spans)
    if (span.kind == tok::SpanKind::word && option_words.count(span.norm)) present.insert(span.norm);
  return {present.begin(), present.end()};
}

}  // namespace

MaskResult mask_word_naive(std::string_view question, std::string_view correct_option,
                           std::string_view sentinel) {
  auto spans = tok::word_tokenize(question);
  std::vector<CandidateWord> candidates;
  for (auto& w : present_words(spans, tok::word_set(correct_option)))
    candidates.push_back({std::move(w), 1, Rational(1), true});
  return mask_words(question, spans, std::move(candidates), Strategy::word_naive, {}, sentinel);
}

MaskResult mask_token_naive(std::string_view question, std::string_view correct_option,
                            const tok::SubwordVocab& vocab, std::string_view sentinel) {
  std::set<std::string> option_pieces;
  for (auto& t : tok::subword_tokenize(correct_option, vocab)) option_pieces.insert(std::move(t.piece));

  MaskResult result;
  result.plan.strategy = Strategy::token_naive;
  std::set<std::string> masked_pieces;
  for (const auto& t : tok::subword_tokenize(question, vocab)) {
    if (!option_pieces.count(t.piece)) continue;
    masked_pieces.insert(t.piece);
    result.plan.spans.push_back({t.start, t.end, Unit::token,
                                 std::string(question.substr(t.start, t.end - t.start)),
                                 Rational(1), true});
  }
  for (const auto& piece : masked_pieces) result.plan.candidate_words.push_back({piece, 1, Rational(1), true});
  result.text = splice(question, result.plan.spans, sentinel);
  return result;
}

MaskResult mask_prob_matching(std::string_view question, std::span<const std::string> options,
                              std::size_t correct_index, const SeedMaterial& seed,
                              std::string_view sentinel) {
  if (options.size() < 2) throw std::invalid_argument("mask_prob_matching: need at least two options");
  if (correct_index >= options.size()) throw std::invalid_argument("mask_prob_matching: correct_index out of range");

  std::vector<WordSet> option_words;
  option_words.reserve(options.size());
  for (const auto& o : options) option_words.push_back(tok::word_set(o));

  auto spans = tok::word_tokenize(question);
  std::vector<CandidateWord> candidates;
  for (auto& w : present_words(spans, option_words[correct_index])) {
    Rational p = mask_probability(w, option_words);
    auto stream = rng::derive(seed.seed, {"mask", seed.example_id, w});
    bool coin = stream.bernoulli(p);
    candidates.push_back({std::move(w), p.denominator(), p, coin});
  }
  return mask_words(question, spans, std::move(candidates), Strategy::prob_matching, seed, sentinel);
}

MaskResult apply_strategy(Strategy strategy, std::string_view question,
                          std::span<const std::string> options, std::size_t correct_index,
                          const SeedMaterial& seed, const tok::SubwordVocab* vocab,
                          std::string_view sentinel) {
  if (correct_index >= options.size()) throw std::invalid_argument("apply_strategy: correct_index out of range");
  MaskResult result;
  switch (strategy) {
    case Strategy::word_naive:
      result = mask_word_naive(question, options[correct_index], sentinel);
      break;
    case Strategy::token_naive:
      if (!vocab) throw ValidationError("token masking requires a subword vocab");
      result = mask_token_naive(question, options[correct_index], *vocab, sentinel);
      break;
    case Strategy::prob_matching:
      return mask_prob_matching(question, options, correct_index, seed, sentinel);
  }
  result.plan.seed_material = seed;
  return result;
}

}  // namespace forge::mask
