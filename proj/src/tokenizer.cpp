#include "forge/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <clocale>
#include <cstdio>
#include <cwctype>
#include <fstream>

#include "forge/error.hpp"

namespace forge::tok {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes
};

// Decodes one code point at `pos`; malformed sequences decode as U+FFFD
// spanning one byte.
CodePoint decode(std::string_view s, std::size_t pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xfffd, 1};
  }
  if (pos + len > s.size()) return {0xfffd, 1};
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char b = byte(pos + i);
    if ((b & 0xc0) != 0x80) return {0xfffd, 1};
    cp = (cp << 6) | (b & 0x3f);
  }
  return {cp, len};
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

locale_t utf8_locale() {
  static locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (!l) l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    return l;
  }();
  return loc;
}

char32_t lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  locale_t loc = utf8_locale();
  if (!loc) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

bool is_alnum(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  locale_t loc = utf8_locale();
  return loc && iswalnum_l(static_cast<wint_t>(cp), loc);
}

bool is_space(char32_t cp) {
  if (cp < 0x80) return cp == ' ' || (cp >= '\t' && cp <= '\r');
  locale_t loc = utf8_locale();
  return loc && iswspace_l(static_cast<wint_t>(cp), loc);
}

std::string describe(char32_t cp) {
  std::string s;
  encode(cp, s);
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
  return "'" + s + "' (" + buf + ")";
}

}  // namespace

std::string normalize(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  for (std::size_t pos = 0; pos < surface.size();) {
    CodePoint cp = decode(surface, pos);
    encode(lower(cp.value), out);
    pos += cp.length;
  }
  return out;
}

std::vector<WordSpan> word_tokenize(std::string_view text) {
  std::vector<WordSpan> spans;
  std::size_t pos = 0;
  while (pos < text.size()) {
    CodePoint cp = decode(text, pos);
    if (is_space(cp.value)) {
      pos += cp.length;
      continue;
    }
    WordSpan span;
    span.start = pos;
    if (is_alnum(cp.value)) {
      std::size_t end = pos + cp.length;
      while (end < text.size()) {
        CodePoint next = decode(text, end);
        if (!is_alnum(next.value)) break;
        end += next.length;
      }
      span.end = end;
      span.kind = SpanKind::word;
    } else {
      span.end = pos + cp.length;
      span.kind = SpanKind::punctuation;
    }
    span.surface = std::string(text.substr(span.start, span.end - span.start));
    span.norm = normalize(span.surface);
    pos = span.end;
    spans.push_back(std::move(span));
  }
  return spans;
}

std::set<std::string> word_set(std::string_view text) {
  std::set<std::string> words;
  for (auto& span : word_tokenize(text))
    if (span.kind == SpanKind::word) words.insert(std::move(span.norm));
  return words;
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  for (const auto& span : word_tokenize(text))
    if (span.kind == SpanKind::word) ++n;
  return n;
}

std::string_view strip_continuation(std::string_view piece) {
  if (piece.size() > kContinuationPrefix.size() && piece.substr(0, kContinuationPrefix.size()) == kContinuationPrefix)
    return piece.substr(kContinuationPrefix.size());
  return piece;
}

SubwordVocab::SubwordVocab(const std::vector<std::string>& entries) {
  for (const auto& raw : entries) {
    std::string entry = normalize(raw);
    if (entry.empty()) continue;
    std::string_view body = strip_continuation(entry);
    std::size_t cps = 0;
    for (std::size_t pos = 0; pos < body.size(); ++cps) pos += decode(body, pos).length;
    max_len_ = std::max(max_len_, cps);
    entries_.insert(std::move(entry));
  }
  if (entries_.empty()) throw std::invalid_argument("subword vocab has no entries");
}

SubwordVocab SubwordVocab::load(std::istream& in) {
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (!line.empty()) entries.push_back(line);
  }
  return SubwordVocab(entries);
}

SubwordVocab SubwordVocab::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocab file '" + path + "'");
  return load(in);
}

std::vector<TokenSpan> subword_tokenize(std::string_view text, const std::vector<WordSpan>& words,
                                        const SubwordVocab& vocab) {
  std::vector<TokenSpan> tokens;
  std::vector<char32_t> cps;
  std::vector<std::size_t> offsets;  // byte offset of each code point, plus end
  std::string candidate;

  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const WordSpan& word = words[wi];
    cps.clear();
    offsets.clear();
    for (std::size_t pos = word.start; pos < word.end;) {
      CodePoint cp = decode(text, pos);
      cps.push_back(lower(cp.value));
      offsets.push_back(pos);
      pos += cp.length;
    }
    offsets.push_back(word.end);

    if (word.kind == SpanKind::punctuation) {
      candidate.clear();
      encode(cps[0], candidate);
      if (!vocab.contains(candidate))
        throw TokenizeError("no vocab entry for character " + describe(cps[0]));
      tokens.push_back({word.start, word.end, candidate, wi});
      continue;
    }

    std::size_t i = 0;
    while (i < cps.size()) {
      const bool continuation = i > 0;
      std::size_t longest = std::min(vocab.max_piece_length(), cps.size() - i);
      bool matched = false;
      for (std::size_t len = longest; len >= 1; --len) {
        candidate.assign(continuation ? kContinuationPrefix : "");
        for (std::size_t j = i; j < i + len; ++j) encode(cps[j], candidate);
        bool found = vocab.contains(candidate);
        if (!found && continuation && len == 1) {
          // Single-character fallback: plain entry doubles as continuation.
          found = vocab.contains(strip_continuation(candidate));
        }
        if (found) {
          tokens.push_back({offsets[i], offsets[i + len], candidate, wi});
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) throw TokenizeError("no vocab entry for character " + describe(cps[i]));
    }
  }
  return tokens;
}

std::vector<TokenSpan> subword_tokenize(std::string_view text, const SubwordVocab& vocab) {
  return subword_tokenize(text, word_tokenize(text), vocab);
}

}  // namespace forge::tok
