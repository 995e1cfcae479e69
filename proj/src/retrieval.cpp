#include "forge/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "forge/error.hpp"
#include "forge/tokenizer.hpp"

namespace forge::retrieval {

using nlohmann::ordered_json;

Rational Bm25Index::avg_doc_len() const {
  if (docs.empty()) return Rational(0);
  return Rational(static_cast<std::int64_t>(total_length), static_cast<std::int64_t>(docs.size()));
}

double Bm25Index::avgdl() const {
  if (docs.empty()) return 0.0;
  return static_cast<double>(total_length) / static_cast<double>(docs.size());
}

double Bm25Index::idf(std::string_view term) const {
  auto it = postings.find(std::string(term));
  double df = it == postings.end() ? 0.0 : static_cast<double>(it->second.size());
  double n = static_cast<double>(docs.size());
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::uint32_t Bm25Index::tf(std::string_view term, std::uint32_t doc_index) const {
  auto it = postings.find(std::string(term));
  if (it == postings.end()) return 0;
  const auto& list = it->second;
  auto pos = std::lower_bound(list.begin(), list.end(), doc_index,
                              [](const Posting& p, std::uint32_t d) { return p.doc < d; });
  return (pos != list.end() && pos->doc == doc_index) ? pos->tf : 0;
}

const IndexedDoc& Bm25Index::doc(std::string_view id) const {
  auto it = doc_by_id.find(std::string(id));
  if (it == doc_by_id.end()) throw ValidationError("unknown doc id '" + std::string(id) + "'");
  return docs[it->second];
}

namespace {

void validate(const Bm25Params& params) {
  if (!(params.k1 > 0.0) || !std::isfinite(params.k1)) throw ValidationError("BM25 k1 must be > 0");
  if (!(params.b >= 0.0 && params.b <= 1.0)) throw ValidationError("BM25 b must be in [0, 1]");
}

// Single source of the per-term formula, so bm25_score and search agree
// bit-for-bit.
double term_weight(const Bm25Index& index, double idf, std::uint32_t tf, std::uint32_t length) {
  const double k1 = index.params.k1;
  const double b = index.params.b;
  const double f = static_cast<double>(tf);
  const double norm = 1.0 - b + b * static_cast<double>(length) / index.avgdl();
  return idf * (f * (k1 + 1.0)) / (f + k1 * norm);
}

void rebuild_lookup(Bm25Index& index) {
  index.doc_by_id.clear();
  for (std::uint32_t i = 0; i < index.docs.size(); ++i) {
    if (!index.doc_by_id.emplace(index.docs[i].id, i).second)
      throw ValidationError("duplicate doc id '" + index.docs[i].id + "'");
  }
}

bool hit_before(const RankedHit& a, const RankedHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

}  // namespace

Bm25Index build_index(const std::vector<DocInput>& inputs, Bm25Params params) {
  validate(params);
  if (inputs.empty()) throw ValidationError("cannot index an empty corpus");

  Bm25Index index;
  index.params = params;
  index.docs.reserve(inputs.size());
  for (std::uint32_t d = 0; d < inputs.size(); ++d) {
    const DocInput& in = inputs[d];
    std::map<std::string, std::uint32_t> counts;
    std::uint32_t length = 0;
    for (const std::string* field : {&in.title, &in.text}) {
      for (auto& term : query_terms(*field)) {
        ++counts[std::move(term)];
        ++length;
      }
    }
    for (auto& [term, tf] : counts) index.postings[term].push_back({d, tf});
    index.total_length += length;
    index.docs.push_back({in.id, in.page.empty() ? in.id : in.page, in.title, in.text, length});
  }
  rebuild_lookup(index);
  return index;
}

std::string_view to_string(Granularity g) { return g == Granularity::paragraph ? "paragraph" : "article"; }

Granularity parse_granularity(std::string_view name) {
  if (name == "paragraph") return Granularity::paragraph;
  if (name == "article") return Granularity::article;
  throw ValidationError("unknown index granularity '" + std::string(name) + "'");
}

std::vector<DocInput> docs_from_records(const std::vector<corpus::DocRecord>& records,
                                        Granularity granularity) {
  std::vector<DocInput> docs;
  for (const auto& rec : records) {
    if (granularity == Granularity::article) {
      std::string text;
      for (std::size_t i = 0; i < rec.paragraphs.size(); ++i) {
        if (i) text += '\n';
        text += rec.paragraphs[i];
      }
      docs.push_back({rec.id, rec.id, rec.title, std::move(text)});
      continue;
    }
    for (std::size_t i = 0; i < rec.paragraphs.size(); ++i)
      docs.push_back({rec.id + "#" + std::to_string(i), rec.id, rec.title, rec.paragraphs[i]});
  }
  return docs;
}

std::vector<std::string> query_terms(std::string_view text) {
  std::vector<std::string> terms;
  for (auto& span : tok::word_tokenize(text))
    if (span.kind == tok::SpanKind::word) terms.push_back(std::move(span.norm));
  return terms;
}

double bm25_score(const Bm25Index& index, std::span<const std::string> terms, std::string_view doc_id) {
  auto it = index.doc_by_id.find(std::string(doc_id));
  if (it == index.doc_by_id.end()) throw ValidationError("unknown doc id '" + std::string(doc_id) + "'");
  const std::uint32_t d = it->second;
  double score = 0.0;
  for (const auto& term : terms) {
    std::uint32_t f = index.tf(term, d);
    if (f == 0) continue;
    score += term_weight(index, index.idf(term), f, index.docs[d].length);
  }
  return score;
}

std::vector<RankedHit> search_terms(const Bm25Index& index, std::span<const std::string> terms,
                                    std::size_t k) {
  if (k == 0) throw ValidationError("search: k must be at least 1");
  if (index.docs.empty()) return {};

  std::vector<double> scores(index.docs.size(), 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<char> seen(index.docs.size(), 0);
  for (const auto& term : terms) {
    auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    const double idf = index.idf(term);
    for (const Posting& p : it->second) {
      scores[p.doc] += term_weight(index, idf, p.tf, index.docs[p.doc].length);
      if (!seen[p.doc]) {
        seen[p.doc] = 1;
        touched.push_back(p.doc);
      }
    }
  }

  std::vector<RankedHit> hits;
  hits.reserve(touched.size());
  for (std::uint32_t d : touched)
    if (scores[d] > 0.0) hits.push_back({index.docs[d].id, scores[d], 0});

  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), hit_before);
  hits.resize(keep);
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
  return hits;
}

std::vector<RankedHit> search(const Bm25Index& index, std::string_view query, std::size_t k) {
  auto terms = query_terms(query);
  return search_terms(index, terms, k);
}

std::vector<std::vector<RankedHit>> search_batch(const Bm25Index& index,
                                                 std::span<const std::string> queries,
                                                 std::size_t k, Threads threads) {
  std::vector<std::vector<RankedHit>> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = search(index, queries[i], k); });
  return out;
}

std::vector<std::vector<RankedHit>> search_batch_serial(const Bm25Index& index,
                                                        std::span<const std::string> queries,
                                                        std::size_t k) {
  std::vector<std::vector<RankedHit>> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(search(index, q, k));
  return out;
}

namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string strip_all(std::string_view text, std::string_view needle) {
  if (needle.empty()) return std::string(text);
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = text.find(needle, pos);
    if (hit == std::string_view::npos) break;
    out.append(text.substr(pos, hit - pos));
    out.push_back(' ');
    pos = hit + needle.size();
  }
  out.append(text.substr(pos));
  return out;
}

}  // namespace

std::string augment_question(std::string_view question, const Bm25Index& index, std::size_t k,
                             std::size_t max_words, std::string_view strip) {
  const std::size_t question_words = corpus::count_words(question);
  if (question_words > max_words)
    throw ValidationError("question has " + std::to_string(question_words) + " words, above max_words " +
                          std::to_string(max_words));
  std::size_t budget = max_words - question_words;
  if (budget == 0 || index.docs.empty()) return std::string(question);

  std::vector<std::string> knowledge;
  for (const auto& hit : search(index, strip_all(question, strip), k)) {
    for (auto& w : split_words(index.doc(hit.doc_id).text)) {
      if (knowledge.size() == budget) break;
      knowledge.push_back(std::move(w));
    }
    if (knowledge.size() == budget) break;
  }
  if (knowledge.empty()) return std::string(question);

  std::string out(question);
  out.append(kKnowledgeSeparator);
  for (std::size_t i = 0; i < knowledge.size(); ++i) {
    if (i) out.push_back(' ');
    out.append(knowledge[i]);
  }
  return out;
}

void save_index(const Bm25Index& index, std::ostream& out) {
  ordered_json doc;
  doc["format"] = std::string(kIndexFormat);
  doc["version"] = kIndexVersion;
  doc["k1"] = index.params.k1;
  doc["b"] = index.params.b;
  doc["total_length"] = index.total_length;
  ordered_json docs = ordered_json::array();
  for (const auto& d : index.docs)
    docs.push_back({{"id", d.id}, {"page", d.page}, {"title", d.title}, {"text", d.text}, {"length", d.length}});
  doc["docs"] = std::move(docs);
  ordered_json postings = ordered_json::object();
  for (const auto& [term, list] : index.postings) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : list) arr.push_back(ordered_json::array({p.doc, p.tf}));
    postings[term] = std::move(arr);
  }
  doc["postings"] = std::move(postings);
  out << doc.dump() << '\n';
  if (!out) throw IoError("failed writing index");
}

void save_index_file(const Bm25Index& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open index file '" + path + "' for writing");
  save_index(index, out);
}

Bm25Index load_index(std::istream& in) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const ordered_json::exception& e) {
    throw ValidationError(std::string("index is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kIndexFormat) throw ValidationError("not a forge BM25 index");
    int version = doc.at("version").get<int>();
    if (version != kIndexVersion)
      throw ValidationError("unsupported index version " + std::to_string(version));
    Bm25Index index;
    index.params = {doc.at("k1").get<double>(), doc.at("b").get<double>()};
    validate(index.params);
    index.total_length = doc.at("total_length").get<std::uint64_t>();
    std::uint64_t length_sum = 0;
    for (const auto& d : doc.at("docs")) {
      index.docs.push_back({d.at("id").get<std::string>(), d.at("page").get<std::string>(),
                            d.at("title").get<std::string>(), d.at("text").get<std::string>(),
                            d.at("length").get<std::uint32_t>()});
      length_sum += index.docs.back().length;
    }
    if (length_sum != index.total_length) throw ValidationError("index total_length does not match doc lengths");
    for (const auto& [term, arr] : doc.at("postings").items()) {
      auto& list = index.postings[term];
      for (const auto& p : arr) {
        Posting posting{p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()};
        if (posting.doc >= index.docs.size()) throw ValidationError("posting for '" + term + "' names a missing doc");
        if (!list.empty() && list.back().doc >= posting.doc)
          throw ValidationError("postings for '" + term + "' are not sorted");
        list.push_back(posting);
      }
    }
    rebuild_lookup(index);
    return index;
  } catch (const ordered_json::exception& e) {
    throw ValidationError(std::string("malformed index: ") + e.what());
  }
}

Bm25Index load_index_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file '" + path + "'");
  return load_index(in);
}

void DenseVectors::add(std::string id, std::vector<double> vector) {
  if (vector.size() != dim)
    throw ValidationError("vector for '" + id + "' has dimension " + std::to_string(vector.size()) +
                          ", expected " + std::to_string(dim));
  for (double v : vector)
    if (!std::isfinite(v)) throw ValidationError("vector for '" + id + "' has a non-finite entry");
  if (!row_by_id.emplace(id, ids.size()).second) throw ValidationError("duplicate vector id '" + id + "'");
  ids.push_back(std::move(id));
  vectors.push_back(std::move(vector));
}

const std::vector<double>* DenseVectors::find(std::string_view id) const {
  auto it = row_by_id.find(std::string(id));
  return it == row_by_id.end() ? nullptr : &vectors[it->second];
}

DenseVectors load_dense_vectors(std::istream& in) {
  DenseVectors out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw ValidationError("vectors line " + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) throw ValidationError("vectors file is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("dim=", 0) != 0) fail("expected header 'dim=<D>'");
  try {
    std::size_t used = 0;
    long long d = std::stoll(line.substr(4), &used);
    if (used != line.size() - 4 || d <= 0) fail("bad dimension");
    out.dim = static_cast<std::size_t>(d);
  } catch (const std::logic_error&) {
    fail("bad dimension");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id;
    fields >> id;
    std::vector<double> v;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) fail("bad number '" + tok + "'");
      } catch (const std::logic_error&) {
        fail("bad number '" + tok + "'");
      }
    }
    try {
      out.add(id, std::move(v));
    } catch (const ValidationError& e) {
      fail(e.what());
    }
  }
  return out;
}

DenseVectors load_dense_vectors_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vectors file '" + path + "'");
  return load_dense_vectors(in);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<RankedHit> dense_search(const DenseVectors& vectors, std::span<const double> query,
                                    std::size_t k, const std::set<std::string>& exclusions) {
  if (query.size() != vectors.dim)
    throw ValidationError("query dimension " + std::to_string(query.size()) + " does not match " +
                          std::to_string(vectors.dim));
  if (k == 0) throw ValidationError("dense_search: k must be at least 1");
  std::vector<RankedHit> hits;
  for (std::size_t i = 0; i < vectors.ids.size(); ++i) {
    if (exclusions.count(vectors.ids[i])) continue;
    hits.push_back({vectors.ids[i], cosine(query, vectors.vectors[i]), 0});
  }
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), hit_before);
  hits.resize(keep);
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].rank = i + 1;
  return hits;
}

}  // namespace forge::retrieval
