#include "forge/generator.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <variant>

#include <json.hpp>

namespace forge::gen {

using nlohmann::json;
using nlohmann::ordered_json;

std::string example_id(const std::string& doc_id, std::int64_t paragraph_index) {
  return doc_id + ":" + (paragraph_index < 0 ? std::string("page") : std::to_string(paragraph_index));
}

MCQAExample generate_example(const corpus::DocRecord& doc, std::int64_t paragraph_index,
                             const std::string& paragraph, const distract::OptionSet& options,
                             const GenConfig& config, const tok::SubwordVocab* vocab) {
  MCQAExample ex;
  ex.id = example_id(doc.id, paragraph_index);
  mask::SeedMaterial seed{config.seed, ex.id};
  auto masked = mask::apply_strategy(config.strategy, paragraph, options.options, options.correct_index, seed,
                                     vocab, config.sentinel);
  ex.question = std::move(masked.text);
  ex.options = options.options;
  ex.correct_index = options.correct_index;
  ex.provenance.doc_id = doc.id;
  ex.provenance.paragraph_index = paragraph_index;
  ex.provenance.paragraph = paragraph;
  ex.provenance.strategy = config.strategy;
  ex.provenance.seed_material = std::move(seed);
  ex.provenance.plan = std::move(masked.plan);
  ex.provenance.option_provenance = options.provenance;
  return ex;
}

std::string check_example(const MCQAExample& ex, std::string_view sentinel) {
  if (ex.question.empty()) return "empty question";
  distract::OptionSet set{ex.options, ex.correct_index, ex.provenance.option_provenance};
  if (auto problem = distract::check_option_set(set); !problem.empty()) return problem;
  const auto& spans = ex.provenance.plan.spans;
  const std::string& para = ex.provenance.paragraph;
  std::size_t cursor = 0;
  for (const auto& s : spans) {
    if (s.start < cursor || s.end <= s.start || s.end > para.size()) return "mask span out of order or range";
    if (para.compare(s.start, s.end - s.start, s.hidden) != 0) return "mask span does not match paragraph";
    cursor = s.end;
  }
  if (mask::splice(para, spans, sentinel) != ex.question) return "question does not match spliced plan";
  return {};
}

namespace {

struct WorkItem {
  std::size_t record = 0;
  std::int64_t paragraph_index = 0;
  std::string text;
};

using ItemResult = std::variant<MCQAExample, std::string>;  // example or skip kind

struct Plan {
  corpus::FilterResult filtered;
  std::vector<WorkItem> items;
};

Plan plan_work(const GenerationInputs& inputs, const GenConfig& config) {
  if (config.n_distractors == 0) throw ValidationError("n_distractors must be at least 1");
  if (config.min_words == 0) throw ValidationError("min_words must be at least 1");
  Plan plan;
  plan.filtered = corpus::filter_records(inputs.records, {true, true, true, config.min_words});
  for (std::size_t r = 0; r < plan.filtered.records.size(); ++r) {
    auto pairs = corpus::extract_paragraphs(plan.filtered.records[r], config.min_words);
    if (pairs.empty()) continue;
    if (config.per_page) {
      std::string joined;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) joined += '\n';
        joined += pairs[i].text;
      }
      plan.items.push_back({r, -1, std::move(joined)});
    } else {
      for (auto& p : pairs)
        plan.items.push_back({r, static_cast<std::int64_t>(p.paragraph_index), std::move(p.text)});
    }
  }
  return plan;
}

std::vector<std::string> page_distractors(const GenerationInputs& inputs, const GenConfig& config,
                                          const corpus::DocRecord& rec) {
  const std::size_t m = config.n_distractors + inputs.diffdx.lookup(rec.title).size();
  const std::string& lead = rec.paragraphs.empty() ? std::string() : rec.paragraphs.front();
  return distract::retrieve_distractors(rec.title, lead, inputs.index, m, {rec.id, {}}, config.query);
}

ItemResult make_item(const GenerationInputs& inputs, const GenConfig& config, const corpus::DocRecord& rec,
                     const WorkItem& item, const std::vector<std::string>& retrieved) {
  try {
    const std::string id = example_id(rec.id, item.paragraph_index);
    auto options = distract::assemble_options(rec.title, inputs.diffdx, retrieved, config.n_distractors,
                                              {config.seed, id});
    return generate_example(rec, item.paragraph_index, item.text, options, config, inputs.vocab);
  } catch (const distract::DistractorShortfall&) {
    return std::string("insufficient_distractors");
  } catch (const tok::TokenizeError&) {
    return std::string("tokenize_error");
  }
}

Dataset collect(Plan plan, std::vector<ItemResult> results) {
  Dataset out;
  out.report.corpus = plan.filtered.stats;
  out.report.pairs_in = plan.items.size();
  for (auto& r : results) {
    if (auto* ex = std::get_if<MCQAExample>(&r)) {
      out.examples.push_back(std::move(*ex));
    } else {
      ++out.report.skipped[std::get<std::string>(r)];
    }
  }
  out.report.examples_out = out.examples.size();
  return out;
}

}  // namespace

Dataset generate_dataset(const GenerationInputs& inputs, const GenConfig& config, Threads threads) {
  if (config.strategy == mask::Strategy::token_naive && !inputs.vocab)
    throw ValidationError("token masking requires a subword vocab");
  Plan plan = plan_work(inputs, config);
  const auto& records = plan.filtered.records;

  std::vector<std::vector<std::string>> retrieved(records.size());
  parallel_for(records.size(), threads,
               [&](std::size_t r) { retrieved[r] = page_distractors(inputs, config, records[r]); });

  std::vector<ItemResult> results(plan.items.size());
  parallel_for(plan.items.size(), threads, [&](std::size_t i) {
    const auto& item = plan.items[i];
    results[i] = make_item(inputs, config, records[item.record], item, retrieved[item.record]);
  });
  return collect(std::move(plan), std::move(results));
}

Dataset generate_dataset_serial(const GenerationInputs& inputs, const GenConfig& config) {
  if (config.strategy == mask::Strategy::token_naive && !inputs.vocab)
    throw ValidationError("token masking requires a subword vocab");
  Plan plan = plan_work(inputs, config);
  const auto& records = plan.filtered.records;
  std::vector<ItemResult> results;
  results.reserve(plan.items.size());
  std::optional<std::size_t> cached_record;
  std::vector<std::string> retrieved;
  for (const auto& item : plan.items) {
    if (cached_record != item.record) {
      retrieved = page_distractors(inputs, config, records[item.record]);
      cached_record = item.record;
    }
    results.push_back(make_item(inputs, config, records[item.record], item, retrieved));
  }
  return collect(std::move(plan), std::move(results));
}

std::string serialize_example(const MCQAExample& ex) {
  const auto& prov = ex.provenance;
  ordered_json spans = ordered_json::array();
  for (const auto& s : prov.plan.spans) {
    spans.push_back({{"start", s.start},
                     {"end", s.end},
                     {"unit", std::string(mask::to_string(s.unit))},
                     {"hidden", s.hidden},
                     {"p", to_string(s.p_applied)},
                     {"coin", s.coin}});
  }
  ordered_json candidates = ordered_json::array();
  for (const auto& c : prov.plan.candidate_words)
    candidates.push_back({{"word", c.word}, {"k", c.k}, {"p", to_string(c.p)}, {"coin", c.coin}});
  ordered_json option_prov = ordered_json::array();
  for (auto s : prov.option_provenance) option_prov.push_back(std::string(distract::to_string(s)));

  ordered_json obj;
  obj["id"] = ex.id;
  obj["question"] = ex.question;
  obj["options"] = ex.options;
  obj["correct_index"] = ex.correct_index;
  obj["provenance"] = ordered_json{{"doc_id", prov.doc_id},
                                   {"paragraph_index", prov.paragraph_index},
                                   {"paragraph", prov.paragraph},
                                   {"strategy", std::string(mask::to_string(prov.strategy))},
                                   {"seed", prov.seed_material.seed},
                                   {"example_id", prov.seed_material.example_id},
                                   {"option_provenance", std::move(option_prov)},
                                   {"mask_plan", {{"spans", std::move(spans)}, {"candidates", std::move(candidates)}}}};
  return obj.dump();
}

void write_dataset(std::ostream& out, const std::vector<MCQAExample>& examples) {
  for (const auto& ex : examples) out << serialize_example(ex) << '\n';
  if (!out) throw IoError("failed writing dataset");
}

void write_dataset_file(const std::string& path, const std::vector<MCQAExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open dataset file '" + path + "' for writing");
  write_dataset(out, examples);
}

namespace {

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
  return *it;
}

template <typename T>
T get(const json& obj, const char* key) {
  const json& v = field(obj, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field \"") + key + "\" has the wrong type");
  }
}

MCQAExample example_from_json(const json& obj) {
  if (!obj.is_object()) throw ValidationError("record must be a JSON object");
  MCQAExample ex;
  ex.id = get<std::string>(obj, "id");
  ex.question = get<std::string>(obj, "question");
  ex.options = get<std::vector<std::string>>(obj, "options");
  const json& ci = field(obj, "correct_index");
  if (!ci.is_number_integer() || ci.get<std::int64_t>() < 0)
    throw ValidationError("field \"correct_index\" must be a non-negative integer");
  ex.correct_index = ci.get<std::size_t>();
  if (ex.correct_index >= ex.options.size()) throw ValidationError("correct_index out of range");

  const json& prov = field(obj, "provenance");
  auto& p = ex.provenance;
  p.doc_id = get<std::string>(prov, "doc_id");
  p.paragraph_index = get<std::int64_t>(prov, "paragraph_index");
  p.paragraph = get<std::string>(prov, "paragraph");
  p.strategy = mask::parse_strategy(get<std::string>(prov, "strategy"));
  p.seed_material.seed = get<std::uint64_t>(prov, "seed");
  p.seed_material.example_id = get<std::string>(prov, "example_id");
  for (const auto& s : get<std::vector<std::string>>(prov, "option_provenance"))
    p.option_provenance.push_back(distract::parse_option_source(s));
  if (p.option_provenance.size() != ex.options.size())
    throw ValidationError("option_provenance length differs from options");

  const json& plan = field(prov, "mask_plan");
  p.plan.strategy = p.strategy;
  p.plan.seed_material = p.seed_material;
  for (const auto& s : field(plan, "spans")) {
    mask::MaskSpan span;
    span.start = get<std::size_t>(s, "start");
    span.end = get<std::size_t>(s, "end");
    span.unit = mask::parse_unit(get<std::string>(s, "unit"));
    span.hidden = get<std::string>(s, "hidden");
    span.p_applied = parse_rational(get<std::string>(s, "p"));
    span.coin = get<bool>(s, "coin");
    if (span.end <= span.start || span.end > p.paragraph.size()) throw ValidationError("mask span out of range");
    p.plan.spans.push_back(std::move(span));
  }
  for (const auto& c : field(plan, "candidates")) {
    p.plan.candidate_words.push_back({get<std::string>(c, "word"), get<std::int64_t>(c, "k"),
                                      parse_rational(get<std::string>(c, "p")), get<bool>(c, "coin")});
  }
  return ex;
}

}  // namespace

DatasetReadResult read_dataset(std::istream& in) {
  DatasetReadResult out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.examples.push_back(example_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      out.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const ValidationError& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw IoError("read failure while reading dataset");
  return out;
}

DatasetReadResult read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");
  return read_dataset(in);
}

}  // namespace forge::gen
