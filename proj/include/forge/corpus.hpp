#pragma once

// Encyclopedic page records: line-delimited JSON ingestion, page filtering and
// (title, paragraph) extraction.
//
// Record line format (one JSON object per line, UTF-8):
//   {"id": "...", "title": "...", "paragraphs": ["...", ...],
//    "source": "wikipedia" | "wikidoc" | "wikem" | "other",
//    "meta": {"is_person": false, "is_organization": false, "is_year": false}}
// "meta" and each of its flags are optional and default to false.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/error.hpp"

namespace forge::corpus {

enum class Source { wikipedia, wikidoc, wikem, other };

std::string_view to_string(Source source);
/// Throws ValidationError on an unknown name.
Source parse_source(std::string_view name);

struct PageFlags {
  bool is_person = false;
  bool is_organization = false;
  bool is_year = false;

  bool operator==(const PageFlags&) const = default;
};

struct DocRecord {
  std::string id;
  std::string title;
  std::vector<std::string> paragraphs;
  Source source = Source::other;
  PageFlags meta;

  bool operator==(const DocRecord&) const = default;
};

struct ParseResult {
  std::vector<DocRecord> records;
  std::vector<LineIssue> errors;
};

/// Parses every line; malformed lines and duplicate ids are collected in
/// `errors` (the first occurrence of an id wins). Blank lines are skipped.
ParseResult parse_records(std::istream& in);

/// Reads a record file from disk. Throws IoError if it cannot be opened.
ParseResult parse_records_file(const std::string& path);

/// One record as a single JSON line (no trailing newline). Every field,
/// including all three flags, is written explicitly.
std::string serialize_record(const DocRecord& record);

void write_records(std::ostream& out, const std::vector<DocRecord>& records);

struct FilterRules {
  bool drop_persons = true;
  bool drop_organizations = true;
  bool drop_years = true;
  // Records without any paragraph of at least this many words are dropped
  // under "no_paragraphs". 0 disables the rule.
  std::size_t min_words = 0;
};

struct CorpusStats {
  std::size_t records_in = 0;
  std::size_t records_kept = 0;
  std::size_t paragraphs_kept = 0;
  std::map<std::string, std::size_t> dropped_by_rule;
};

struct FilterResult {
  std::vector<DocRecord> records;
  CorpusStats stats;
};

/// True iff the trimmed title is a bare 3-4 digit integer.
bool is_year_title(std::string_view title);

/// Drops person/organization/year pages. A record is counted under the first
/// rule that fires, in the order person, organization, year, no_paragraphs.
FilterResult filter_records(const std::vector<DocRecord>& records, const FilterRules& rules = {});

struct TitledParagraph {
  std::string title;
  std::string text;
  std::size_t paragraph_index = 0;
};

/// Whitespace-delimited word count, the unit used by length thresholds.
std::size_t count_words(std::string_view text);

constexpr std::size_t kDefaultMinWords = 30;

/// Paragraphs with at least `min_words` words, verbatim, in page order.
std::vector<TitledParagraph> extract_paragraphs(const DocRecord& record,
                                                std::size_t min_words = kDefaultMinWords);

/// Collapses internal whitespace runs to one space and trims both ends.
std::string collapse_whitespace(std::string_view text);

}  // namespace forge::corpus
