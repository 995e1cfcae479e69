#include "forge/audit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "forge/rng.hpp"
#include "forge/tokenizer.hpp"

namespace forge::audit {

using nlohmann::ordered_json;

FeatureVector CueFeatures::vector(std::size_t i) const {
  const auto& o = options[i];
  return {static_cast<double>(o.unmasked_overlap), static_cast<double>(o.absent),
          static_cast<double>(o.opt_len), static_cast<double>(mask_count)};
}

namespace {

// Question pieces between sentinel occurrences.
template <typename Fn>
void for_each_unmasked_segment(std::string_view question, std::string_view sentinel, Fn&& fn) {
  if (sentinel.empty()) {
    fn(question);
    return;
  }
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = question.find(sentinel, pos);
    if (hit == std::string_view::npos) break;
    fn(question.substr(pos, hit - pos));
    pos = hit + sentinel.size();
  }
  fn(question.substr(pos));
}

}  // namespace

std::set<std::string> unmasked_words(std::string_view question, std::string_view sentinel) {
  std::set<std::string> words;
  for_each_unmasked_segment(question, sentinel, [&](std::string_view segment) {
    auto ws = tok::word_set(segment);
    words.insert(ws.begin(), ws.end());
  });
  return words;
}

std::size_t count_sentinels(std::string_view question, std::string_view sentinel) {
  if (sentinel.empty()) return 0;
  std::size_t n = 0;
  for (std::size_t pos = question.find(sentinel); pos != std::string_view::npos;
       pos = question.find(sentinel, pos + sentinel.size()))
    ++n;
  return n;
}

CueFeatures extract_cue_features(const gen::MCQAExample& example, std::string_view sentinel) {
  CueFeatures f;
  f.correct_index = example.correct_index;
  f.mask_count = count_sentinels(example.question, sentinel);
  const auto present = unmasked_words(example.question, sentinel);
  f.options.reserve(example.options.size());
  for (const auto& option : example.options) {
    OptionFeatures o;
    for (const auto& w : tok::word_set(option)) {
      ++o.opt_len;
      if (present.count(w)) ++o.unmasked_overlap;
    }
    o.absent = o.opt_len - o.unmasked_overlap;
    f.options.push_back(o);
  }
  return f;
}

std::vector<CueFeatures> extract_features_batch(std::span<const gen::MCQAExample> examples,
                                                std::string_view sentinel, Threads threads) {
  std::vector<CueFeatures> out(examples.size());
  parallel_for(examples.size(), threads,
               [&](std::size_t i) { out[i] = extract_cue_features(examples[i], sentinel); });
  return out;
}

std::vector<CueFeatures> extract_features_batch_serial(std::span<const gen::MCQAExample> examples,
                                                       std::string_view sentinel) {
  std::vector<CueFeatures> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(extract_cue_features(ex, sentinel));
  return out;
}

Params params_of(const CueClassifier& c) {
  Params p{};
  std::copy(c.weights.begin(), c.weights.end(), p.begin());
  p[kFeatureDim] = c.bias;
  return p;
}

void set_params(CueClassifier& c, const Params& p) {
  std::copy(p.begin(), p.begin() + kFeatureDim, c.weights.begin());
  c.bias = p[kFeatureDim];
}

namespace {

double linear(const Params& p, const FeatureVector& x) {
  double s = p[kFeatureDim];
  for (std::size_t j = 0; j < kFeatureDim; ++j) s += p[j] * x[j];
  return s;
}

// Scores, then softmax in place; returns log-sum-exp of the scores.
double softmax(std::vector<double>& v) {
  double hi = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - hi);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return hi + std::log(sum);
}

// Expected accuracy of argmax with uniform tie-breaking.
double expected_hit(const std::vector<double>& scores, std::size_t correct) {
  double best = *std::max_element(scores.begin(), scores.end());
  std::size_t ties = 0;
  for (double s : scores) ties += (s == best);
  return scores[correct] == best ? 1.0 / static_cast<double>(ties) : 0.0;
}

}  // namespace

double CueClassifier::score(const CueFeatures& f, std::size_t option) const {
  return linear(params_of(*this), f.vector(option));
}

std::vector<double> CueClassifier::probabilities(const CueFeatures& f) const {
  std::vector<double> s(f.options.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = score(f, i);
  softmax(s);
  return s;
}

double log_loss(const Params& params, std::span<const CueFeatures> data) {
  double total = 0.0;
  std::vector<double> s;
  for (const auto& f : data) {
    s.resize(f.options.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = linear(params, f.vector(i));
    double correct = s[f.correct_index];
    double lse = softmax(s);
    total += lse - correct;
  }
  return total / static_cast<double>(data.size());
}

Params log_loss_gradient(const Params& params, std::span<const CueFeatures> data) {
  Params grad{};
  std::vector<double> s;
  for (const auto& f : data) {
    s.resize(f.options.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = linear(params, f.vector(i));
    softmax(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double coef = s[i] - (i == f.correct_index ? 1.0 : 0.0);
      const auto x = f.vector(i);
      for (std::size_t j = 0; j < kFeatureDim; ++j) grad[j] += coef * x[j];
      grad[kFeatureDim] += coef;
    }
  }
  for (double& g : grad) g /= static_cast<double>(data.size());
  return grad;
}

CueClassifier train_cue_classifier(std::span<const CueFeatures> train, std::size_t epochs, double learning_rate,
                                   std::uint64_t seed) {
  if (train.size() < 2) throw ValidationError("cue classifier needs at least two training examples");
  for (const auto& f : train)
    if (f.options.size() < 2) throw ValidationError("cue classifier needs at least two options per example");

  CueClassifier model;
  model.epochs = epochs;
  model.learning_rate = learning_rate;
  model.seed = seed;
  Params p = params_of(model);
  for (std::size_t e = 0; e < epochs; ++e) {
    Params g = log_loss_gradient(p, train);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= learning_rate * g[j];
  }
  set_params(model, p);
  return model;
}

double accuracy(const CueClassifier& c, std::span<const CueFeatures> data) {
  if (data.empty()) return 0.0;
  double hits = 0.0;
  const Params p = params_of(c);
  std::vector<double> s;
  for (const auto& f : data) {
    s.resize(f.options.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = linear(p, f.vector(i));
    hits += expected_hit(s, f.correct_index);
  }
  return hits / static_cast<double>(data.size());
}

double min_overlap_rule_accuracy(std::span<const CueFeatures> data) {
  if (data.empty()) return 0.0;
  double hits = 0.0;
  std::vector<double> s;
  for (const auto& f : data) {
    s.resize(f.options.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -static_cast<double>(f.options[i].unmasked_overlap);
    hits += expected_hit(s, f.correct_index);
  }
  return hits / static_cast<double>(data.size());
}

std::set<std::string> high_frequency_words(std::span<const gen::MCQAExample> examples) {
  std::set<std::string> seen_paragraphs;
  std::map<std::string, std::size_t> df;
  for (const auto& ex : examples) {
    const auto& p = ex.provenance;
    if (!seen_paragraphs.insert(p.doc_id + '\x1f' + std::to_string(p.paragraph_index)).second) continue;
    for (const auto& w : tok::word_set(p.paragraph)) ++df[w];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t top = (ranked.size() + 9) / 10;
  std::set<std::string> out;
  for (std::size_t i = 0; i < top; ++i) out.insert(ranked[i].first);
  return out;
}

std::map<mask::Strategy, ExtraneousStats> extraneous_stats(std::span<const gen::MCQAExample> examples,
                                                           const std::set<std::string>& high_frequency) {
  std::map<mask::Strategy, ExtraneousStats> out;
  for (const auto& ex : examples) {
    auto& stats = out[ex.provenance.strategy];
    ++stats.examples;
    const auto words = tok::word_tokenize(ex.provenance.paragraph);
    for (const auto& span : ex.provenance.plan.spans) {
      ++stats.masked_spans;
      auto it = std::upper_bound(words.begin(), words.end(), span.start,
                                 [](std::size_t pos, const tok::WordSpan& w) { return pos < w.start; });
      if (it == words.begin()) continue;
      const auto& word = *std::prev(it);
      if (span.start >= word.end) continue;
      if (word.kind == tok::SpanKind::punctuation) {
        ++stats.masked_punctuation;
      } else if (high_frequency.count(word.norm)) {
        ++stats.masked_high_frequency;
      }
    }
  }
  return out;
}

bool in_train_split(const std::string& example_id, double split, std::uint64_t seed) {
  std::uint64_t h = rng::derive_key(seed, {"split", example_id});
  return static_cast<double>(h % 1000000) < split * 1000000.0;
}

AuditReport audit_dataset(std::span<const gen::MCQAExample> examples, const AuditConfig& config, Threads threads) {
  if (!(config.split > 0.0 && config.split < 1.0)) throw ValidationError("split must be in (0, 1)");
  auto features = extract_features_batch(examples, config.sentinel, threads);

  std::vector<CueFeatures> train, eval;
  double chance = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (in_train_split(examples[i].id, config.split, config.seed)) {
      train.push_back(std::move(features[i]));
    } else {
      chance += 1.0 / static_cast<double>(features[i].options.size());
      eval.push_back(std::move(features[i]));
    }
  }
  if (eval.size() < kMinEvalExamples)
    throw ValidationError("audit needs at least " + std::to_string(kMinEvalExamples) +
                          " evaluation examples, got " + std::to_string(eval.size()) + " from " +
                          std::to_string(examples.size()) + " examples at split " + std::to_string(config.split));

  AuditReport report;
  report.n_train = train.size();
  report.n_eval = eval.size();
  report.chance = chance / static_cast<double>(eval.size());
  report.classifier = train_cue_classifier(train, config.epochs, config.learning_rate, config.seed);
  report.accuracy = accuracy(report.classifier, eval);
  report.min_overlap_rule_accuracy = min_overlap_rule_accuracy(eval);
  auto high = high_frequency_words(examples);
  report.high_frequency_words = high.size();
  report.extraneous = extraneous_stats(examples, high);
  return report;
}

void write_report(std::ostream& out, const AuditReport& report, const AuditConfig& config) {
  ordered_json extraneous = ordered_json::object();
  for (const auto& [strategy, s] : report.extraneous) {
    extraneous[std::string(mask::to_string(strategy))] = {{"examples", s.examples},
                                                          {"masked_spans", s.masked_spans},
                                                          {"masked_punctuation", s.masked_punctuation},
                                                          {"masked_high_frequency", s.masked_high_frequency},
                                                          {"extraneous", s.extraneous()}};
  }
  ordered_json doc;
  doc["adversary"] =
      "linear softmax over options; features per option: unmasked_overlap, absent, opt_len, "
      "mask_count. One instantiation of a cue-based classifier, not an exhaustive one.";
  doc["config"] = {{"split", config.split},
                   {"epochs", config.epochs},
                   {"lr", config.learning_rate},
                   {"seed", config.seed},
                   {"mask_sentinel", config.sentinel}};
  doc["accuracy"] = report.accuracy;
  doc["chance"] = report.chance;
  doc["min_overlap_rule_accuracy"] = report.min_overlap_rule_accuracy;
  doc["n_train"] = report.n_train;
  doc["n_eval"] = report.n_eval;
  doc["weights"] = {{"unmasked_overlap", report.classifier.weights[0]},
                    {"absent", report.classifier.weights[1]},
                    {"opt_len", report.classifier.weights[2]},
                    {"mask_count", report.classifier.weights[3]},
                    {"bias", report.classifier.bias}};
  doc["high_frequency_words"] = report.high_frequency_words;
  doc["extraneous"] = std::move(extraneous);
  out << doc.dump(2) << '\n';
}

}  // namespace forge::audit
