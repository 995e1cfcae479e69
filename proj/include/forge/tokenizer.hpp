#pragma once

// Word and subword tokenization with exact byte-offset spans.
//
// Offsets are byte offsets into the UTF-8 input, so text.substr(start,
// end - start) is always the span's surface. A word is a maximal run of
// alphanumeric code points; every other non-space code point is its own
// punctuation span.

#include <cstddef>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace forge::tok {

enum class SpanKind { word, punctuation };

struct WordSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string surface;
  std::string norm;
  SpanKind kind = SpanKind::word;
};

/// Unicode-aware lowercase (simple per-code-point case mapping).
std::string normalize(std::string_view surface);

std::vector<WordSpan> word_tokenize(std::string_view text);

/// Distinct normalized words (punctuation excluded).
std::set<std::string> word_set(std::string_view text);

/// Number of word-kind spans.
std::size_t word_count(std::string_view text);

inline constexpr std::string_view kContinuationPrefix = "##";

/// Uncased subword inventory. Entries are normalized on load; continuation
/// pieces carry the "##" prefix. A plain single-character entry also serves as
/// its own continuation piece, so any text over the vocab's single-character
/// alphabet tokenizes.
class SubwordVocab {
 public:
  SubwordVocab() = default;
  /// Throws std::invalid_argument if no usable entry remains.
  explicit SubwordVocab(const std::vector<std::string>& entries);

  static SubwordVocab load(std::istream& in);
  /// Throws forge::IoError if the file cannot be opened.
  static SubwordVocab load_file(const std::string& path);

  bool contains(std::string_view piece) const { return entries_.count(std::string(piece)) > 0; }
  std::size_t size() const { return entries_.size(); }
  /// Longest entry length in code points, continuation prefix excluded.
  std::size_t max_piece_length() const { return max_len_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::unordered_set<std::string> entries_;
  std::size_t max_len_ = 0;
};

struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string piece;            // normalized, with "##" on continuation pieces
  std::size_t word_index = 0;   // index into word_tokenize(text)
};

class TokenizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Greedy longest-match decomposition of every word span; punctuation spans
/// become single-character pieces. Throws TokenizeError naming the first
/// character that has no vocab entry.
std::vector<TokenSpan> subword_tokenize(std::string_view text, const SubwordVocab& vocab);

/// Same, over spans already produced by word_tokenize(text).
std::vector<TokenSpan> subword_tokenize(std::string_view text, const std::vector<WordSpan>& words,
                                        const SubwordVocab& vocab);

/// Piece text with any continuation prefix removed.
std::string_view strip_continuation(std::string_view piece);

}  // namespace forge::tok
