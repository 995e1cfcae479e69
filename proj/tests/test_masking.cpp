#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "forge/masking.hpp"

using forge::Rational;
using namespace forge::mask;
namespace tok = forge::tok;

namespace {

// Independent count over raw option strings, splitting on anything that is
// not a letter or digit.
std::int64_t brute_count(const std::string& w, const std::vector<std::string>& options) {
  std::int64_t k = 0;
  for (const auto& o : options) {
    std::string cur;
    bool found = false;
    for (char ch : o + " ") {
      if (std::isalnum(static_cast<unsigned char>(ch))) {
        cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      } else {
        if (cur == w) found = true;
        cur.clear();
      }
    }
    k += found;
  }
  return k;
}

std::vector<std::pair<std::size_t, std::size_t>> covered(const MaskResult& r) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : r.plan.spans) out.emplace_back(s.start, s.end);
  return out;
}

}  // namespace

TEST_CASE("mask_probability equals brute-force inverse count") {
  std::mt19937 gen(17);
  const std::vector<std::string> pool = {"acute", "chronic", "disease", "fever", "type", "syndrome", "viral",
                                         "kidney", "heart", "failure"};
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 2 + gen() % 7;
    std::vector<std::string> options;
    for (std::size_t i = 0; i < n; ++i) {
      std::string o;
      std::size_t len = 1 + gen() % 3;
      for (std::size_t j = 0; j < len; ++j) o += (j ? " " : "") + pool[gen() % pool.size()];
      if (gen() % 4 == 0) o[0] = static_cast<char>(std::toupper(o[0]));
      options.push_back(o);
    }
    for (const auto& w : pool) {
      std::int64_t k = brute_count(w, options);
      if (k == 0) {
        CHECK_THROWS_AS(mask_probability(w, std::span<const std::string>(options)), std::invalid_argument);
      } else {
        CHECK(mask_probability(w, std::span<const std::string>(options)) == Rational(1, k));
      }
    }
  }
}

TEST_CASE("splice replaces spans") {
  std::vector<MaskSpan> spans = {{0, 3, Unit::word, "The", Rational(1), true},
                                 {8, 12, Unit::word, "fox.", Rational(1), true}};
  CHECK(splice("The red fox.", spans, "_") == "_ red _");
}

TEST_CASE("word_naive masks every occurrence of correct-option words only") {
  MaskResult r = mask_word_naive("Common cold and the common flu: cold season.", "Common cold");
  CHECK(r.text == "[MASK] [MASK] and the [MASK] flu: [MASK] season.");
  CHECK(r.plan.strategy == Strategy::word_naive);
  REQUIRE(r.plan.candidate_words.size() == 2);
  CHECK(r.plan.candidate_words[0].word == "cold");
  CHECK(r.plan.candidate_words[0].p == Rational(1));
}

TEST_CASE("RT-PCR: dash masked at token level, untouched at word level") {
  tok::SubwordVocab vocab({"co", "##vid", "-", "19", "rt", "pc", "##r", "test", "a", "##n", "n", "##a", "s", "##l"});
  std::string q = "An RT-PCR test";
  MaskResult word = mask_word_naive(q, "COVID-19");
  CHECK(word.text == q);
  MaskResult token = mask_token_naive(q, "COVID-19", vocab);
  CHECK(token.text == "An RT[MASK]PCR test");
  REQUIRE(token.plan.spans.size() == 1);
  CHECK(token.plan.spans[0].hidden == "-");
  CHECK(token.plan.spans[0].unit == Unit::token);
}

TEST_CASE("token masking covers word masking") {
  tok::SubwordVocab vocab({"a", "b", "c", "d", "ab", "##b", "##c", "##d", "##a", "##cd", "-", ","});
  std::mt19937 gen(23);
  auto rand_word = [&] {
    std::string w;
    for (std::size_t i = 0, n = 1 + gen() % 4; i < n; ++i) w += static_cast<char>('a' + gen() % 4);
    return w;
  };
  for (int trial = 0; trial < 300; ++trial) {
    std::string q, o;
    for (int i = 0; i < 8; ++i) q += rand_word() + (gen() % 3 == 0 ? "-" : " ");
    o = rand_word() + " " + rand_word();
    auto w = covered(mask_word_naive(q, o));
    auto t = covered(mask_token_naive(q, o, vocab));
    for (auto [ws, we] : w) {
      std::size_t pos = ws;
      for (auto [ts, te] : t) {
        if (ts == pos && te <= we) pos = te;
      }
      CHECK(pos == we);
    }
  }
}

TEST_CASE("prob_matching records one coin per word type") {
  std::vector<std::string> options = {"Acute pancreatitis", "Chronic pancreatitis", "Acute kidney injury"};
  std::string q = "Acute pancreatitis is an acute illness of the pancreas; pancreatitis recurs.";
  MaskResult r = mask_prob_matching(q, options, 0, {7, "ex"});
  REQUIRE(r.plan.candidate_words.size() == 2);
  CHECK(r.plan.candidate_words[0].word == "acute");
  CHECK(r.plan.candidate_words[0].k == 2);
  CHECK(r.plan.candidate_words[0].p == Rational(1, 2));
  CHECK(r.plan.candidate_words[1].word == "pancreatitis");
  CHECK(r.plan.candidate_words[1].k == 2);
  for (const auto& c : r.plan.candidate_words) {
    std::size_t masked = 0;
    for (const auto& s : r.plan.spans) masked += forge::tok::normalize(s.hidden) == c.word;
    CHECK(masked == (c.coin ? 2u : 0u));
  }
  CHECK(splice(q, r.plan.spans) == r.text);
  MaskResult again = mask_prob_matching(q, options, 0, {7, "ex"});
  CHECK(again.plan == r.plan);
  CHECK_THROWS_AS(mask_prob_matching(q, std::span<const std::string>(options.data(), 1), 0, {7, "ex"}),
                  std::invalid_argument);
}

TEST_CASE("prob_matching masks a shared word at rate 1/k") {
  // k = 4 options contain "fever"; rate must be 0.25 within 3 standard errors.
  std::vector<std::string> options = {"Dengue fever", "Typhoid fever", "Scarlet fever", "Rheumatic fever",
                                      "Malaria", "Measles", "Gout", "Asthma"};
  const int trials = 100000;
  int masked = 0;
  for (int t = 0; t < trials; ++t) {
    MaskResult r = mask_prob_matching("High fever persists", options, 0, {1234, "e" + std::to_string(t)});
    masked += !r.plan.spans.empty();
  }
  double rate = static_cast<double>(masked) / trials;
  CHECK(std::abs(rate - 0.25) < 0.004);
}

TEST_CASE("words only in the correct option are always masked") {
  std::vector<std::string> options = {"Gout", "Lupus"};
  for (int t = 0; t < 200; ++t) {
    MaskResult r = mask_prob_matching("Gout flares at night", options, 0, {5, std::to_string(t)});
    CHECK(r.text == "[MASK] flares at night");
  }
}

TEST_CASE("apply_strategy dispatch and token vocab requirement") {
  std::vector<std::string> options = {"Gout", "Lupus"};
  SeedMaterial seed{1, "x"};
  CHECK(apply_strategy(Strategy::word_naive, "Gout hurts", options, 0, seed, nullptr).text == "[MASK] hurts");
  CHECK_THROWS(apply_strategy(Strategy::token_naive, "Gout hurts", options, 0, seed, nullptr));
  CHECK(parse_strategy("prob") == Strategy::prob_matching);
  CHECK(parse_strategy("token_naive") == Strategy::token_naive);
  CHECK_THROWS(parse_strategy("random"));
}

TEST_CASE("custom sentinel") {
  CHECK(mask_word_naive("Gout hurts", "Gout", "<m>").text == "<m> hurts");
}
