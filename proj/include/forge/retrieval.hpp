#pragma once

// Okapi BM25 over normalized word tokens of title + text.
//
//   score(q, d) = sum_{t in q} idf(t) * tf(t,d) * (k1 + 1)
//                                / (tf(t,d) + k1 * (1 - b + b * |d| / avgdl))
//   idf(t)      = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5))
//
// Repeated query terms contribute once per occurrence. Ties rank by doc id
// (byte-wise ascending).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/corpus.hpp"
#include "forge/parallel.hpp"
#include "forge/rational.hpp"

namespace forge::retrieval {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  bool operator==(const Bm25Params&) const = default;
};

struct IndexedDoc {
  std::string id;
  std::string page;   // owning page id (equals id for article granularity)
  std::string title;
  std::string text;
  std::uint32_t length = 0;  // word tokens in title + text

  bool operator==(const IndexedDoc&) const = default;
};

struct DocInput {
  std::string id;
  std::string page;
  std::string title;
  std::string text;
};

struct Posting {
  std::uint32_t doc = 0;  // index into Bm25Index::docs
  std::uint32_t tf = 0;

  bool operator==(const Posting&) const = default;
};

/// Immutable after construction; safe to share between reader threads.
struct Bm25Index {
  Bm25Params params;
  std::vector<IndexedDoc> docs;
  std::map<std::string, std::vector<Posting>> postings;  // postings sorted by doc
  std::uint64_t total_length = 0;
  std::unordered_map<std::string, std::uint32_t> doc_by_id;

  std::size_t doc_count() const { return docs.size(); }
  Rational avg_doc_len() const;
  double avgdl() const;
  double idf(std::string_view term) const;
  std::uint32_t tf(std::string_view term, std::uint32_t doc) const;
  const IndexedDoc& doc(std::string_view id) const;  // throws ValidationError

  bool operator==(const Bm25Index& other) const {
    return params == other.params && docs == other.docs && postings == other.postings &&
           total_length == other.total_length;
  }
};

/// Throws ValidationError on duplicate ids, an empty corpus or bad params
/// (k1 <= 0, b outside [0, 1]).
Bm25Index build_index(const std::vector<DocInput>& docs, Bm25Params params = {});

enum class Granularity { paragraph, article };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view name);

/// Paragraph docs get ids "<page id>#<paragraph index>"; article docs join all
/// paragraphs with "\n".
std::vector<DocInput> docs_from_records(const std::vector<corpus::DocRecord>& records,
                                        Granularity granularity);

/// Normalized word tokens, in order, duplicates kept.
std::vector<std::string> query_terms(std::string_view text);

/// Throws ValidationError on an unknown doc id.
double bm25_score(const Bm25Index& index, std::span<const std::string> terms, std::string_view doc_id);

struct RankedHit {
  std::string doc_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const RankedHit&) const = default;
};

/// Top-k positively scoring docs. k must be >= 1.
std::vector<RankedHit> search(const Bm25Index& index, std::string_view query, std::size_t k);
std::vector<RankedHit> search_terms(const Bm25Index& index, std::span<const std::string> terms,
                                    std::size_t k);

/// One search per query. The parallel kernel and its serial reference return
/// identical results.
std::vector<std::vector<RankedHit>> search_batch(const Bm25Index& index,
                                                 std::span<const std::string> queries,
                                                 std::size_t k, Threads threads = {});
std::vector<std::vector<RankedHit>> search_batch_serial(const Bm25Index& index,
                                                        std::span<const std::string> queries,
                                                        std::size_t k);

inline constexpr std::string_view kKnowledgeSeparator = "\n\n";

/// Question, then the separator, then the top-k passage texts in rank order
/// joined by single spaces, truncated word-wise so the whole output has at
/// most max_words whitespace-delimited words. The question is never
/// truncated; if no passage word fits the question is returned unchanged.
/// Occurrences of `strip` (the mask sentinel) are removed from the query.
/// Throws ValidationError if the question alone exceeds max_words.
std::string augment_question(std::string_view question, const Bm25Index& index, std::size_t k = 10,
                             std::size_t max_words = 256, std::string_view strip = "[MASK]");

inline constexpr std::string_view kIndexFormat = "forge-bm25";
inline constexpr int kIndexVersion = 1;

/// JSON document tagged with format name and version. save(load(x)) is
/// byte-identical to x.
void save_index(const Bm25Index& index, std::ostream& out);
void save_index_file(const Bm25Index& index, const std::string& path);
Bm25Index load_index(std::istream& in);
Bm25Index load_index_file(const std::string& path);

/// Externally computed embeddings (stand-in for a trained retriever).
struct DenseVectors {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> vectors;
  std::unordered_map<std::string, std::size_t> row_by_id;

  /// Throws ValidationError on a dimension mismatch, duplicate id or
  /// non-finite entry.
  void add(std::string id, std::vector<double> vector);
  const std::vector<double>* find(std::string_view id) const;
};

/// Format: header line "dim=<D>", then "<id> v1 ... vD" per line (the id has
/// no spaces). Throws ValidationError naming the bad line.
DenseVectors load_dense_vectors(std::istream& in);
DenseVectors load_dense_vectors_file(const std::string& path);

double cosine(std::span<const double> a, std::span<const double> b);

/// Top-k by cosine similarity, ties by id. Throws ValidationError on a
/// dimension mismatch.
std::vector<RankedHit> dense_search(const DenseVectors& vectors, std::span<const double> query,
                                    std::size_t k, const std::set<std::string>& exclusions = {});

}  // namespace forge::retrieval
