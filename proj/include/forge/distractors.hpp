#pragma once

// Incorrect-option sourcing: a differential-diagnosis graph, BM25 retrieval
// over sibling pages, option-set assembly, and ranking evaluation against the
// graph.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/error.hpp"
#include "forge/masking.hpp"
#include "forge/rational.hpp"
#include "forge/retrieval.hpp"

namespace forge::distract {

/// Case- and whitespace-insensitive key used for every title comparison.
std::string title_key(std::string_view title);

/// Directed title -> differential-diagnosis associations.
class DiffDxGraph {
 public:
  /// Adds source -> target. Returns false for self-edges (dropped) and
  /// duplicates (collapsed). Titles must be non-blank.
  bool add_edge(std::string_view source, std::string_view target);

  /// Differential-diagnosis titles of `title`, in insertion order. Empty if
  /// unknown.
  const std::vector<std::string>& lookup(std::string_view title) const;

  /// Source titles with at least one edge, in key order.
  std::vector<std::string> sources() const;
  /// Every title mentioned as a source or a target, in key order.
  std::vector<std::string> titles() const;

  std::size_t size() const { return edges_; }
  bool empty() const { return edges_ == 0; }

  /// Copy with every reverse edge added.
  DiffDxGraph symmetrized() const;

 private:
  struct Node {
    std::string title;
    std::vector<std::string> targets;
    std::set<std::string> target_keys;
  };
  std::map<std::string, Node> nodes_;
  std::map<std::string, std::string> display_;  // key -> first-seen title
  std::size_t edges_ = 0;
};

struct DiffDxLoad {
  DiffDxGraph graph;
  std::size_t self_edges_dropped = 0;
  std::size_t duplicates_collapsed = 0;
  std::vector<LineIssue> errors;
};

/// Tab-separated "source_title<TAB>diffdx_title" lines. Blank lines are
/// skipped; other malformed lines are reported with their line number.
DiffDxLoad load_diffdx(std::istream& in);
DiffDxLoad load_diffdx_file(const std::string& path);

/// Word-set Jaccard similarity of two titles (normalized words).
double title_jaccard(std::string_view a, std::string_view b);

inline constexpr double kNearDuplicateJaccard = 0.8;

enum class QueryMode { title, title_lead };

std::string_view to_string(QueryMode mode);
/// Accepts "title" and "title+lead".
QueryMode parse_query_mode(std::string_view name);

struct RetrievalExclusions {
  std::string page_id;                  // hits from this page are skipped
  std::set<std::string> excluded_ids;   // page or doc ids
};

/// Top-m distinct page titles ranked by BM25 with the query built from
/// `mode`. Skips the page itself, excluded ids, the correct title and titles
/// with Jaccard >= 0.8 to it. m must be >= 1.
std::vector<std::string> retrieve_distractors(std::string_view title, std::string_view lead_paragraph,
                                              const retrieval::Bm25Index& index, std::size_t m,
                                              const RetrievalExclusions& exclusions = {},
                                              QueryMode mode = QueryMode::title_lead);

enum class OptionSource { title, diffdx, retrieved };

std::string_view to_string(OptionSource source);
OptionSource parse_option_source(std::string_view name);

struct OptionSet {
  std::vector<std::string> options;
  std::size_t correct_index = 0;
  std::vector<OptionSource> provenance;

  bool operator==(const OptionSet&) const = default;
};

/// Raised when too few distinct distractors are available.
class DistractorShortfall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Differential diagnoses first (up to n_distractors), then retrieved titles
/// to fill; all distinct by title_key and distinct from the correct title.
/// The n_distractors + 1 options are shuffled by a stream keyed by seed.
OptionSet assemble_options(std::string_view correct_title, const DiffDxGraph& diffdx,
                           const std::vector<std::string>& retrieved, std::size_t n_distractors,
                           const mask::SeedMaterial& seed);

/// Checks OptionSet invariants; returns a description of the first violation
/// or an empty string.
std::string check_option_set(const OptionSet& set);

struct RetrievalEvalReport {
  std::size_t k = 0;
  BigRational precision_at_k;
  BigRational recall_at_k;
  std::size_t queries_evaluated = 0;
};

/// Maps a query title to titles ranked best-first.
using Ranker = std::function<std::vector<std::string>(const std::string& query_title)>;

/// precision@k = mean |top-k & gold| / k, recall@k = mean |top-k & gold| / |gold|
/// over every source title with at least one gold edge. Throws
/// ValidationError on an empty graph or k == 0.
RetrievalEvalReport eval_retrieval(const DiffDxGraph& graph, const Ranker& ranker, std::size_t k);

/// Uniformly random order over `universe` minus the query, keyed by
/// (seed, query title); only the first `depth` titles are produced.
Ranker make_random_ranker(std::vector<std::string> universe, std::uint64_t seed, std::size_t depth);

/// BM25 over page titles. With QueryMode::title_lead the lead paragraph of the
/// query's own page (if indexed) is appended to the query.
Ranker make_bm25_ranker(const retrieval::Bm25Index& index, QueryMode mode, std::size_t depth);

/// Cosine ranking over vectors keyed by title.
Ranker make_dense_ranker(const retrieval::DenseVectors& vectors, std::size_t depth);

}  // namespace forge::distract
