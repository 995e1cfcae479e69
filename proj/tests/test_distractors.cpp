#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "forge/distractors.hpp"

using namespace forge::distract;
using forge::BigRational;
namespace retrieval = forge::retrieval;

namespace {

// Ten lines: two repeat an earlier edge (one differing only in case).
const char* kTenLines =
    "Common cold\tInfluenza\n"
    "Common cold\tAllergic rhinitis\n"
    "Influenza\tCommon cold\n"
    "Common cold\tinfluenza\n"
    "Gout\tPseudogout\n"
    "Gout\tSeptic arthritis\n"
    "Asthma\tCOPD\n"
    "Gout\tPseudogout\n"
    "Asthma\tHeart failure\n"
    "Migraine\tTension headache\n";

std::map<OptionSource, int> counts(const OptionSet& s) {
  std::map<OptionSource, int> out;
  for (auto p : s.provenance) ++out[p];
  return out;
}

}  // namespace

TEST_CASE("load diffdx collapses duplicates") {
  std::istringstream in(kTenLines);
  DiffDxLoad load = load_diffdx(in);
  CHECK(load.errors.empty());
  CHECK(load.graph.size() == 8);
  CHECK(load.duplicates_collapsed == 2);
  CHECK(load.graph.lookup("COMMON COLD") == std::vector<std::string>{"Influenza", "Allergic rhinitis"});
  CHECK(load.graph.lookup("Unknown").empty());
}

TEST_CASE("self edges and malformed lines") {
  std::istringstream in("Gout\tgout\nno tab here\n\nA\tB\n\tB\n");
  DiffDxLoad load = load_diffdx(in);
  CHECK(load.self_edges_dropped == 1);
  CHECK(load.graph.size() == 1);
  REQUIRE(load.errors.size() == 2);
  CHECK(load.errors[0].line == 2);
  CHECK(load.errors[1].line == 5);
}

TEST_CASE("symmetrize adds reverse edges once") {
  std::istringstream in(kTenLines);
  DiffDxGraph g = load_diffdx(in).graph.symmetrized();
  CHECK(g.lookup("Pseudogout") == std::vector<std::string>{"Gout"});
  // Influenza <-> Common cold existed in both directions already.
  CHECK(g.lookup("Influenza") == std::vector<std::string>{"Common cold"});
  CHECK(g.size() == 14);
}

TEST_CASE("title jaccard") {
  CHECK(title_jaccard("Common cold", "common COLD") == 1.0);
  CHECK(title_jaccard("Acute pancreatitis", "Chronic pancreatitis") == doctest::Approx(1.0 / 3));
  CHECK(title_jaccard("Gout", "Asthma") == 0.0);
}

TEST_CASE("assemble takes diffdx first then retrieved, and shuffles") {
  DiffDxGraph g;
  g.add_edge("Gout", "Pseudogout");
  g.add_edge("Gout", "Septic arthritis");
  std::vector<std::string> retrieved = {"pseudogout", "Osteoarthritis", "Rheumatoid arthritis", "Lupus",
                                        "Cellulitis", "Bursitis", "Tendinitis"};
  OptionSet s = assemble_options("Gout", g, retrieved, 7, {3, "gout:0"});
  CHECK(check_option_set(s).empty());
  REQUIRE(s.options.size() == 8);
  CHECK(s.options[s.correct_index] == "Gout");
  auto c = counts(s);
  CHECK(c[OptionSource::title] == 1);
  CHECK(c[OptionSource::diffdx] == 2);
  CHECK(c[OptionSource::retrieved] == 5);
  std::set<std::string> opts(s.options.begin(), s.options.end());
  CHECK(opts.count("Tendinitis") == 0);
  CHECK(opts.count("Pseudogout") == 1);
  CHECK(assemble_options("Gout", g, retrieved, 7, {3, "gout:0"}) == s);

  // Correct position is spread over all slots across seeds.
  std::set<std::size_t> positions;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    positions.insert(assemble_options("Gout", g, retrieved, 7, {seed, "gout:0"}).correct_index);
  CHECK(positions.size() == 8);
}

TEST_CASE("assemble raises a shortfall when too few distractors exist") {
  DiffDxGraph g;
  g.add_edge("Gout", "Pseudogout");
  CHECK_THROWS_AS(assemble_options("Gout", g, {"gout", "Lupus"}, 3, {1, "x"}), DistractorShortfall);
}

TEST_CASE("diffdx alone can fill the option set") {
  DiffDxGraph g;
  for (const char* t : {"A1", "A2", "A3"}) g.add_edge("Root", t);
  OptionSet s = assemble_options("Root", g, {"R1"}, 2, {1, "x"});
  auto c = counts(s);
  CHECK(c[OptionSource::diffdx] == 2);
  CHECK(c[OptionSource::retrieved] == 0);
}

TEST_CASE("retrieve_distractors filters self, near duplicates and excluded pages") {
  retrieval::Bm25Index idx = retrieval::build_index({
      {"p1#0", "p1", "Common cold", "Common cold causes a runny nose and sneezing."},
      {"p1#1", "p1", "Common cold", "Rest and fluids help the common cold."},
      {"p2#0", "p2", "Common cold.", "A duplicate page about the common cold and runny nose."},
      {"p3#0", "p3", "Influenza", "Influenza causes fever, cough and a runny nose."},
      {"p4#0", "p4", "Allergic rhinitis", "Sneezing and a runny nose after pollen exposure."},
      {"p5#0", "p5", "Sinusitis", "Facial pressure with a runny nose."},
      {"p6#0", "p6", "Gout", "Painful toe joints."},
  });
  auto got = retrieve_distractors("Common cold", "runny nose and sneezing", idx, 2, {"p1", {"p5"}});
  CHECK(got == std::vector<std::string>{"Allergic rhinitis", "Influenza"});
  auto more = retrieve_distractors("Common cold", "runny nose and sneezing", idx, 10, {"p1", {}});
  std::set<std::string> s(more.begin(), more.end());
  CHECK(s.count("Common cold.") == 0);
  CHECK(s.count("Sinusitis") == 1);
  CHECK(s.size() == more.size());
}

TEST_CASE("eval_retrieval on a five-query toy graph") {
  DiffDxGraph g;
  for (const char* t : {"B", "C"}) g.add_edge("A", t);
  g.add_edge("D", "E");
  for (const char* t : {"G", "H", "I", "J"}) g.add_edge("F", t);
  g.add_edge("K", "L");
  for (const char* t : {"N", "O", "P"}) g.add_edge("M", t);
  std::map<std::string, std::vector<std::string>> fixed = {
      {"A", {"B", "X", "C"}},       // hits 2: p 2/3, r 1
      {"D", {"X", "Y", "Z"}},       // hits 0
      {"F", {"G", "H", "I", "J"}},  // hits 3 in top 3: p 1, r 3/4
      {"K", {"L"}},                 // hits 1: p 1/3, r 1
      {"M", {"N", "Q", "R", "O"}},  // hits 1 in top 3: p 1/3, r 1/3
  };
  Ranker r = [&](const std::string& q) { return fixed.at(q); };
  RetrievalEvalReport rep = eval_retrieval(g, r, 3);
  CHECK(rep.queries_evaluated == 5);
  CHECK(rep.precision_at_k == BigRational(7, 15));
  CHECK(rep.recall_at_k == BigRational(37, 60));
  CHECK_THROWS_AS(eval_retrieval(g, r, 0), forge::ValidationError);
  CHECK_THROWS_AS(eval_retrieval(DiffDxGraph{}, r, 3), forge::ValidationError);
}

TEST_CASE("random ranker excludes the query and is reproducible") {
  std::vector<std::string> universe = {"A", "B", "C", "D", "E"};
  Ranker r = make_random_ranker(universe, 8, 3);
  auto a = r("C");
  CHECK(a.size() == 3);
  CHECK(std::find(a.begin(), a.end(), "C") == a.end());
  CHECK(r("C") == a);
}

TEST_CASE("bm25 ranker returns titles other than the query") {
  retrieval::Bm25Index idx = retrieval::build_index({
      {"p1#0", "p1", "Gout", "Gout causes painful swollen joints."},
      {"p2#0", "p2", "Pseudogout", "Crystal deposits cause painful swollen joints."},
      {"p3#0", "p3", "Asthma", "Wheezing and cough."},
  });
  Ranker r = make_bm25_ranker(idx, QueryMode::title_lead, 2);
  auto got = r("Gout");
  REQUIRE(!got.empty());
  CHECK(got[0] == "Pseudogout");
  CHECK(std::find(got.begin(), got.end(), "Gout") == got.end());
}

TEST_CASE("dense ranker maps underscores to spaces") {
  std::istringstream in("dim=2\nCommon_cold 1 0\nInfluenza 0.9 0.1\nGout 0 1\n");
  auto v = retrieval::load_dense_vectors(in);
  Ranker r = make_dense_ranker(v, 1);
  CHECK(r("Common cold") == std::vector<std::string>{"Influenza"});
}

TEST_CASE("query mode names") {
  CHECK(parse_query_mode("title+lead") == QueryMode::title_lead);
  CHECK(parse_query_mode("title") == QueryMode::title);
  CHECK_THROWS(parse_query_mode("lead"));
}
