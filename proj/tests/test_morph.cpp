#include "doctest.h"

#include "coach/morph.hpp"
#include "support.hpp"

namespace {

std::size_t learner_rules_in(const coach::LexicalEdge& e, const coach::Grammar& g) {
  std::size_t n = 0;
  for (const auto& r : e.rules) n += g.lexical_rule(r)->learner;
  return n;
}

}  // namespace

TEST_CASE("analyses of the example forms") {
  const auto& g = support::strict();
  auto p = coach::analyze_token("personas", g);
  REQUIRE(p.size() == 1);
  CHECK(p[0].lemma == "persona");
  CHECK(p[0].tag == "NCFP000");
  auto f = coach::analyze_token("famosos", g);
  REQUIRE(f.size() == 1);
  CHECK(f[0].lemma == "famoso");
  CHECK(f[0].tag == "AQ0MP0");
  CHECK(coach::analyze_token("xyzzy", g).empty());
}

TEST_CASE("tags follow the toy tagset") {
  CHECK(coach::valid_tag("NCFP000"));
  CHECK(coach::valid_tag("AQ0MP0"));
  CHECK(coach::valid_tag("DA0FS0"));
  CHECK_FALSE(coach::valid_tag("XYZ"));
  CHECK_FALSE(coach::valid_tag(""));
  for (const auto& [surface, entries] : support::strict().lexicon) {
    for (const auto& e : entries) CHECK_MESSAGE(coach::valid_tag(e.tag), e.id);
  }
}

TEST_CASE("strict mode yields only the faithful gender") {
  const auto& g = support::strict();
  const auto& h = g.hierarchy;
  auto edges = coach::lexical_edges({"famosos", "famoso", "AQ0MP0"}, g);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].fs.type_at({"PNG", "GEN"}) == h.id("masc"));
  CHECK(edges[0].fs.type_at({"LEARNER"}) == h.id("-"));
  CHECK_FALSE(edges[0].learner);
  CHECK(edges[0].signature() == "adj-lex+adj-masc-pl-lr");
}

TEST_CASE("learner mode adds the other gender with LEARNER +") {
  const auto& g = support::learner();
  const auto& h = g.hierarchy;
  auto adj = coach::lexical_edges({"famosos", "famoso", "AQ0MP0"}, g);
  REQUIRE(adj.size() == 2);
  std::map<std::string, std::string> gender_to_learner;
  for (const auto& e : adj) {
    gender_to_learner[h.name(*e.fs.type_at({"PNG", "GEN"}))] = h.name(*e.fs.type_at({"LEARNER"}));
  }
  CHECK(gender_to_learner == std::map<std::string, std::string>{{"masc", "-"}, {"fem", "+"}});
  for (const auto& e : adj) CHECK(e.fs.type_at({"PNG", "PERNUM"}) == h.id("pl"));

  auto noun = coach::lexical_edges({"personas", "persona", "NCFP000"}, g);
  REQUIRE(noun.size() == 2);
  gender_to_learner.clear();
  for (const auto& e : noun) {
    gender_to_learner[h.name(*e.fs.type_at({"PNG", "GEN"}))] = h.name(*e.fs.type_at({"LEARNER"}));
  }
  CHECK(gender_to_learner == std::map<std::string, std::string>{{"fem", "-"}, {"masc", "+"}});
}

TEST_CASE("determiners and verbs are never relaxed") {
  const auto& g = support::learner();
  for (const char* w : {"mis", "las", "son", "duerme", "de"}) {
    for (const auto& e : coach::token_edges(w, g)) CHECK_FALSE(e.learner);
  }
}

TEST_CASE("lexical edge properties over the whole lexicon") {
  const auto& s = support::strict();
  const auto& l = support::learner();
  for (const auto& [surface, entries] : l.lexicon) {
    auto strict_edges = coach::token_edges(surface, s);
    auto learner_edges = coach::token_edges(surface, l);
    CHECK_MESSAGE(!strict_edges.empty(), surface);
    for (const auto& e : strict_edges) {
      CHECK(e.fs.type_at({"LEARNER"}) == s.hierarchy.id("-"));
      CHECK(e.rules.size() <= coach::kMaxChain);
    }
    for (const auto& e : learner_edges) {
      CHECK(e.rules.size() <= coach::kMaxChain);
      bool matches_strict = false;
      for (const auto& se : strict_edges) matches_strict |= se.fs.canonical(s.hierarchy) == e.fs.canonical(l.hierarchy);
      bool uses_learner = learner_rules_in(e, l) > 0;
      CHECK_MESSAGE((matches_strict || uses_learner), surface);
      CHECK(e.learner == uses_learner);
      CHECK((e.fs.type_at({"LEARNER"}) == l.hierarchy.id("+")) == uses_learner);
    }
  }
}

TEST_CASE("tokenization strips punctuation and keeps code-point offsets") {
  const auto& g = support::strict();
  auto t = coach::tokenize("¿Mis abuelos son personas famosas?", g);
  REQUIRE(t.size() == 5);
  CHECK(t[0].text == "Mis");
  CHECK(t[0].form == "mis");
  CHECK(t[0].start == 1);
  CHECK(t[0].end == 4);
  CHECK(t[4].text == "famosas");
  CHECK(t[4].end == 33);
  auto n = coach::tokenize("el niño duerme", g);
  REQUIRE(n.size() == 3);
  CHECK(n[1].start == 3);
  CHECK(n[1].end == 7);
  CHECK(coach::codepoint_count("niño") == 4);
  CHECK(coach::to_lower("NIÑO Él") == "niño él");
}

TEST_CASE("unknown tokens pass through unchanged") {
  auto t = coach::tokenize("Xyzzy", support::strict());
  REQUIRE(t.size() == 1);
  CHECK(t[0].form == "Xyzzy");
}
