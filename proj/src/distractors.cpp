#include "forge/distractors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_map>

#include "forge/corpus.hpp"
#include "forge/rng.hpp"
#include "forge/tokenizer.hpp"

namespace forge::distract {

std::string title_key(std::string_view title) {
  return tok::normalize(corpus::collapse_whitespace(title));
}

bool DiffDxGraph::add_edge(std::string_view source, std::string_view target) {
  std::string src = corpus::collapse_whitespace(source);
  std::string dst = corpus::collapse_whitespace(target);
  if (src.empty() || dst.empty()) throw ValidationError("diffdx titles must be non-blank");
  std::string src_key = tok::normalize(src);
  std::string dst_key = tok::normalize(dst);
  if (src_key == dst_key) return false;

  display_.emplace(src_key, src);
  display_.emplace(dst_key, dst);
  Node& node = nodes_[src_key];
  if (node.title.empty()) node.title = src;
  if (!node.target_keys.insert(dst_key).second) return false;
  node.targets.push_back(dst);
  ++edges_;
  return true;
}

const std::vector<std::string>& DiffDxGraph::lookup(std::string_view title) const {
  static const std::vector<std::string> none;
  auto it = nodes_.find(title_key(title));
  return it == nodes_.end() ? none : it->second.targets;
}

std::vector<std::string> DiffDxGraph::sources() const {
  std::vector<std::string> out;
  for (const auto& [key, node] : nodes_)
    if (!node.targets.empty()) out.push_back(node.title);
  return out;
}

std::vector<std::string> DiffDxGraph::titles() const {
  std::vector<std::string> out;
  out.reserve(display_.size());
  for (const auto& [key, title] : display_) out.push_back(title);
  return out;
}

DiffDxGraph DiffDxGraph::symmetrized() const {
  DiffDxGraph out = *this;
  for (const auto& [key, node] : nodes_)
    for (const auto& t : node.targets) out.add_edge(t, node.title);
  return out;
}

DiffDxLoad load_diffdx(std::istream& in) {
  DiffDxLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (corpus::collapse_whitespace(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      out.errors.push_back({line_no, "expected two tab-separated titles"});
      continue;
    }
    if (line.find('\t', tab + 1) != std::string::npos) {
      out.errors.push_back({line_no, "more than two tab-separated fields"});
      continue;
    }
    std::string_view src = std::string_view(line).substr(0, tab);
    std::string_view dst = std::string_view(line).substr(tab + 1);
    if (corpus::collapse_whitespace(src).empty() || corpus::collapse_whitespace(dst).empty()) {
      out.errors.push_back({line_no, "empty title"});
      continue;
    }
    if (title_key(src) == title_key(dst)) {
      ++out.self_edges_dropped;
      continue;
    }
    if (!out.graph.add_edge(src, dst)) ++out.duplicates_collapsed;
  }
  if (in.bad()) throw IoError("read failure while loading diffdx file");
  return out;
}

DiffDxLoad load_diffdx_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open diffdx file '" + path + "'");
  return load_diffdx(in);
}

double title_jaccard(std::string_view a, std::string_view b) {
  auto wa = tok::word_set(a);
  auto wb = tok::word_set(b);
  if (wa.empty() && wb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : wa) inter += wb.count(w);
  std::size_t uni = wa.size() + wb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string_view to_string(QueryMode mode) { return mode == QueryMode::title ? "title" : "title+lead"; }

QueryMode parse_query_mode(std::string_view name) {
  if (name == "title") return QueryMode::title;
  if (name == "title+lead") return QueryMode::title_lead;
  throw ValidationError("unknown query mode '" + std::string(name) + "'");
}

std::vector<std::string> retrieve_distractors(std::string_view title, std::string_view lead_paragraph,
                                              const retrieval::Bm25Index& index, std::size_t m,
                                              const RetrievalExclusions& exclusions, QueryMode mode) {
  if (m == 0) throw ValidationError("retrieve_distractors: m must be at least 1");
  std::string query(title);
  if (mode == QueryMode::title_lead) {
    query += ' ';
    query.append(lead_paragraph);
  }
  const auto terms = retrieval::query_terms(query);
  const std::string correct_key = title_key(title);

  std::vector<std::string> picked;
  std::set<std::string> picked_keys;
  // Widen the search until m titles survive the filters or hits run out.
  std::size_t depth = std::max<std::size_t>(4 * m, 16);
  std::size_t scanned = 0;
  while (true) {
    auto hits = retrieval::search_terms(index, terms, depth);
    for (; scanned < hits.size() && picked.size() < m; ++scanned) {
      const auto& doc = index.doc(hits[scanned].doc_id);
      if (doc.page == exclusions.page_id) continue;
      if (exclusions.excluded_ids.count(doc.page) || exclusions.excluded_ids.count(doc.id)) continue;
      std::string key = title_key(doc.title);
      if (key == correct_key || picked_keys.count(key)) continue;
      if (title_jaccard(doc.title, title) >= kNearDuplicateJaccard) continue;
      picked_keys.insert(key);
      picked.push_back(doc.title);
    }
    if (picked.size() >= m || hits.size() < depth) break;
    depth *= 2;
  }
  return picked;
}

std::string_view to_string(OptionSource source) {
  switch (source) {
    case OptionSource::title: return "title";
    case OptionSource::diffdx: return "diffdx";
    case OptionSource::retrieved: return "retrieved";
  }
  return "retrieved";
}

OptionSource parse_option_source(std::string_view name) {
  if (name == "title") return OptionSource::title;
  if (name == "diffdx") return OptionSource::diffdx;
  if (name == "retrieved") return OptionSource::retrieved;
  throw ValidationError("unknown option provenance '" + std::string(name) + "'");
}

OptionSet assemble_options(std::string_view correct_title, const DiffDxGraph& diffdx,
                           const std::vector<std::string>& retrieved, std::size_t n_distractors,
                           const mask::SeedMaterial& seed) {
  if (n_distractors == 0) throw ValidationError("n_distractors must be at least 1");

  struct Entry {
    std::string text;
    OptionSource source;
  };
  std::vector<Entry> entries;
  std::set<std::string> keys;
  std::string correct = corpus::collapse_whitespace(correct_title);
  entries.push_back({correct, OptionSource::title});
  keys.insert(tok::normalize(correct));

  auto take = [&](const std::vector<std::string>& pool, OptionSource source) {
    for (const auto& t : pool) {
      if (entries.size() == n_distractors + 1) return;
      std::string text = corpus::collapse_whitespace(t);
      if (text.empty() || !keys.insert(tok::normalize(text)).second) continue;
      entries.push_back({std::move(text), source});
    }
  };
  take(diffdx.lookup(correct_title), OptionSource::diffdx);
  take(retrieved, OptionSource::retrieved);

  if (entries.size() < n_distractors + 1) {
    throw DistractorShortfall("only " + std::to_string(entries.size() - 1) + " distinct distractors for '" +
                              correct + "', need " + std::to_string(n_distractors) + " (short by " +
                              std::to_string(n_distractors + 1 - entries.size()) + ")");
  }

  auto stream = rng::derive(seed.seed, {"options", seed.example_id});
  stream.shuffle(entries.begin(), entries.end());

  OptionSet set;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].source == OptionSource::title) set.correct_index = i;
    set.options.push_back(std::move(entries[i].text));
    set.provenance.push_back(entries[i].source);
  }
  return set;
}

std::string check_option_set(const OptionSet& set) {
  if (set.options.size() != set.provenance.size()) return "options and provenance differ in length";
  if (set.correct_index >= set.options.size()) return "correct_index out of range";
  std::size_t titles = 0;
  std::set<std::string> keys;
  for (std::size_t i = 0; i < set.options.size(); ++i) {
    if (set.provenance[i] == OptionSource::title) {
      ++titles;
      if (i != set.correct_index) return "title provenance on a non-correct option";
    }
    if (!keys.insert(title_key(set.options[i])).second) return "duplicate option '" + set.options[i] + "'";
  }
  if (titles != 1) return "expected exactly one title option";
  return {};
}

RetrievalEvalReport eval_retrieval(const DiffDxGraph& graph, const Ranker& ranker, std::size_t k) {
  if (k == 0) throw ValidationError("eval_retrieval: k must be at least 1");
  if (graph.empty()) throw ValidationError("eval_retrieval: graph has no edges");

  RetrievalEvalReport report;
  report.k = k;
  BigRational precision_sum = 0;
  BigRational recall_sum = 0;
  for (const auto& source : graph.sources()) {
    const auto& gold = graph.lookup(source);
    std::set<std::string> gold_keys;
    for (const auto& g : gold) gold_keys.insert(title_key(g));

    std::set<std::string> top;
    for (const auto& t : ranker(source)) {
      if (top.size() == k) break;
      top.insert(title_key(t));
    }
    std::size_t hits = 0;
    for (const auto& t : top) hits += gold_keys.count(t);

    precision_sum += BigRational(hits, k);
    recall_sum += BigRational(hits, gold_keys.size());
    ++report.queries_evaluated;
  }
  report.precision_at_k = precision_sum / report.queries_evaluated;
  report.recall_at_k = recall_sum / report.queries_evaluated;
  return report;
}

Ranker make_random_ranker(std::vector<std::string> universe, std::uint64_t seed, std::size_t depth) {
  return [universe = std::move(universe), seed, depth](const std::string& query) {
    const std::string qkey = title_key(query);
    std::vector<const std::string*> pool;
    pool.reserve(universe.size());
    for (const auto& t : universe)
      if (title_key(t) != qkey) pool.push_back(&t);
    auto stream = rng::derive(seed, {"random-ranker", qkey});
    // Partial Fisher-Yates: only the first `depth` positions are needed.
    std::size_t n = std::min(depth, pool.size());
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + stream.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(*pool[i]);
    }
    return out;
  };
}

Ranker make_bm25_ranker(const retrieval::Bm25Index& index, QueryMode mode, std::size_t depth) {
  // Lead paragraph per page title: the indexed doc with the lowest id of that
  // page's title ("<page>#0" at paragraph granularity).
  auto leads = std::make_shared<std::unordered_map<std::string, std::string>>();
  if (mode == QueryMode::title_lead) {
    std::unordered_map<std::string, std::string> best_id;
    for (const auto& d : index.docs) {
      std::string key = title_key(d.title);
      auto it = best_id.find(key);
      if (it == best_id.end() || d.id < it->second) {
        best_id[key] = d.id;
        (*leads)[key] = d.text;
      }
    }
  }
  return [&index, mode, depth, leads](const std::string& query) {
    std::string lead;
    if (mode == QueryMode::title_lead) {
      auto it = leads->find(title_key(query));
      if (it != leads->end()) lead = it->second;
    }
    return retrieve_distractors(query, lead, index, std::max<std::size_t>(depth, 1), {}, mode);
  };
}

Ranker make_dense_ranker(const retrieval::DenseVectors& vectors, std::size_t depth) {
  // Vector ids spell titles with '_' in place of spaces.
  auto by_key = std::make_shared<std::unordered_map<std::string, std::size_t>>();
  auto display = std::make_shared<std::vector<std::string>>();
  for (std::size_t i = 0; i < vectors.ids.size(); ++i) {
    std::string title = vectors.ids[i];
    std::replace(title.begin(), title.end(), '_', ' ');
    by_key->emplace(title_key(title), i);
    display->push_back(std::move(title));
  }
  return [&vectors, depth, by_key, display](const std::string& query) {
    std::vector<std::string> out;
    auto it = by_key->find(title_key(query));
    if (it == by_key->end()) return out;
    const auto& qvec = vectors.vectors[it->second];
    auto hits = retrieval::dense_search(vectors, qvec, std::max<std::size_t>(depth, 1) + 1,
                                        {vectors.ids[it->second]});
    for (const auto& h : hits) {
      if (out.size() == depth) break;
      out.push_back((*display)[vectors.row_by_id.at(h.doc_id)]);
    }
    return out;
  };
}

}  // namespace forge::distract
