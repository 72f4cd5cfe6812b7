#include "doctest.h"

#include <cmath>

#include "coach/errors.hpp"
#include "coach/supertagger.hpp"
#include "properties.hpp"
#include "support.hpp"

namespace {

const std::vector<coach::TreebankItem>& treebank() {
  static const auto tb = coach::read_treebank(coach::data_dir() / "treebank.tsv");
  return tb;
}

const coach::SupertagModel& bundled() {
  static const auto m = coach::load_supertag_model(coach::bundled_supertag_model_path());
  return m;
}

std::vector<std::string> forms_of(const std::string& sentence, const coach::Grammar& g) {
  std::vector<std::string> out;
  for (const auto& t : coach::tokenize(sentence, g)) out.push_back(t.form);
  return out;
}

std::size_t rank_of(const coach::TokenRanking& r, const std::string& sig) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].signature == sig) return i + 1;
  }
  return 0;
}

}  // namespace

TEST_CASE("an empty treebank gives the uniform distribution") {
  const auto& g = support::learner();
  auto m = coach::train_supertagger({}, g);
  CHECK(m.unigram.empty());
  auto r = coach::predict({"famosas"}, m, g);
  REQUIRE(r.size() == 1);
  REQUIRE(r[0].size() == 2);
  for (const auto& s : r[0]) CHECK(s.probability == doctest::Approx(0.5));
}

TEST_CASE("one sentence makes its signature dominate") {
  const auto& g = support::learner();
  coach::Parser p(support::strict());
  auto gold = p.parse("las personas famosas duermen").readings.at(0).derivation_string;
  auto m = coach::train_supertagger({{"x", "las personas famosas duermen", gold}}, g);
  auto r = coach::predict(forms_of("las personas famosas duermen", g), m, g);
  REQUIRE(r.size() == 4);
  CHECK(r[2][0].signature == "adj-lex+adj-fem-pl-lr");
  CHECK(r[2][0].probability > r[2][1].probability);
}

TEST_CASE("rankings are distributions") {
  const auto& g = support::learner();
  for (const auto& item : support::desk_suite()) {
    for (const auto& token : coach::predict(forms_of(item.sentence, g), bundled(), g)) {
      double sum = 0;
      for (const auto& s : token) sum += s.probability;
      if (!token.empty()) CHECK(sum == doctest::Approx(1.0));
    }
  }
  CHECK(coach::predict(std::vector<std::string>{}, bundled(), g).empty());
}

TEST_CASE("unknown tokens get the uniform ranking in signature order") {
  auto r = coach::predict({"qqq"}, {{"c", "a", "b"}}, bundled());
  REQUIRE(r[0].size() == 3);
  CHECK(r[0][0].signature == "a");
  CHECK(r[0][2].signature == "c");
  for (const auto& s : r[0]) CHECK(s.probability == doctest::Approx(1.0 / 3));
}

TEST_CASE("the bundled treebank has forty validated sentences") {
  const auto& g = support::learner();
  REQUIRE(treebank().size() == 40);
  for (const auto& item : treebank()) {
    auto sigs = coach::gold_signatures(item.derivation, g);
    CHECK(sigs.size() == coach::tokenize(item.sentence, g).size());
  }
}

TEST_CASE("gold signatures rank high on the training sentences") {
  const auto& g = support::learner();
  std::size_t tokens = 0, rank1 = 0, top2 = 0;
  for (const auto& item : treebank()) {
    auto gold = coach::gold_signatures(item.derivation, g);
    auto ranking = coach::predict(forms_of(item.sentence, g), bundled(), g);
    for (std::size_t i = 0; i < gold.size(); ++i) {
      ++tokens;
      std::size_t r = rank_of(ranking[i], gold[i]);
      rank1 += r == 1;
      top2 += r >= 1 && r <= 2;
    }
  }
  CHECK(top2 == tokens);
  CHECK(static_cast<double>(rank1) / static_cast<double>(tokens) >= 0.9);
}

TEST_CASE("training is deterministic and serialization round-trips") {
  const auto& g = support::learner();
  auto a = coach::train_supertagger(treebank(), g);
  auto b = coach::train_supertagger(treebank(), g);
  CHECK(a.serialize() == b.serialize());
  CHECK(a.hash() == b.hash());
  CHECK(a.serialize() == bundled().serialize());
  auto back = coach::SupertagModel::deserialize(a.serialize());
  CHECK(back.serialize() == a.serialize());
  CHECK(back.unigram == a.unigram);
  CHECK(back.bigram == a.bigram);
  CHECK_THROWS_AS(coach::SupertagModel::deserialize("not-a-model\n"), coach::InputError);
}

TEST_CASE("treebank derivations must resolve against the grammar") {
  const auto& g = support::learner();
  CHECK_THROWS_AS(coach::train_supertagger({{"x", "la niña", "(bogus-rule 0 2 (la 0 1 \"la\") (niña 1 2 \"niña\"))"}}, g),
                  coach::InputError);
}

TEST_CASE("filter_edges keeps the top k and never empties a token") {
  const auto& g = support::learner();
  auto tokens = coach::tokenize("mis abuelos son personas famosos", g);
  auto edges = coach::sentence_lexical_edges(tokens, g);
  std::vector<std::string> forms;
  for (const auto& t : tokens) forms.push_back(t.form);
  auto ranking = coach::predict(forms, bundled(), g);

  auto all = coach::filter_edges(edges, ranking, 100);
  REQUIRE(all.size() == edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) CHECK(all[i].size() == edges[i].size());

  auto one = coach::filter_edges(edges, ranking, 1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    CHECK_FALSE(one[i].empty());
    for (const auto& e : one[i]) CHECK(e.signature() == ranking[i][0].signature);
  }

  std::vector<coach::TokenRanking> foreign(edges.size(), coach::TokenRanking{{"nothing-licensed", 1.0}});
  auto kept = coach::filter_edges(edges, foreign, 1);
  for (std::size_t i = 0; i < edges.size(); ++i) CHECK_FALSE(kept[i].empty());

  CHECK_THROWS_AS(coach::filter_edges(edges, ranking, 0), coach::PreconditionError);
}

TEST_CASE("smaller k never builds more edges") {
  const auto& g = support::learner();
  coach::Parser p(g);
  for (const auto& item : support::desk_suite()) {
    auto tokens = coach::tokenize(item.sentence, g);
    std::size_t previous = p.parse(tokens).stats.edges_built;
    std::size_t previous_attempts = p.parse(tokens).stats.unification_attempts;
    for (std::size_t k : {4, 3, 2, 1}) {
      coach::ParseOptions o;
      o.supertag_k = k;
      o.supertag_model = &bundled();
      auto r = p.parse(tokens, o);
      CHECK_MESSAGE(r.stats.edges_built <= previous, item.id);
      CHECK(r.stats.unification_attempts <= previous_attempts);
      previous = r.stats.edges_built;
      previous_attempts = r.stats.unification_attempts;
    }
  }
}

TEST_CASE("k = 1 keeps the gold reading of the corrected example") {
  coach::TestItem item{"ex", "mis abuelos son personas famosas", coach::Expected::grammatical};
  auto rep = properties::evaluate_supertagger(support::learner(), {item}, bundled(), 1);
  CHECK(rep.items == 1);
  CHECK(rep.gold_kept == 1);
  CHECK(rep.edges_filtered < rep.edges_unfiltered);
}

TEST_CASE("k = 1 loses learner readings whose relaxation edge ranks second") {
  const auto& g = support::learner();
  auto rep = properties::evaluate_supertagger(g, support::suite("learner"), bundled(), 1);
  REQUIRE(rep.items == 12);
  CHECK_FALSE(rep.misses.empty());
  for (const auto& item : support::suite("learner")) {
    if (std::find(rep.misses.begin(), rep.misses.end(), item.id) == rep.misses.end()) continue;
    auto tokens = coach::tokenize(item.sentence, g);
    coach::Parser p(g);
    auto gold = coach::gold_signatures(p.parse(tokens).readings.at(0).derivation_string, g);
    std::vector<std::string> forms;
    for (const auto& t : tokens) forms.push_back(t.form);
    auto ranking = coach::predict(forms, bundled(), g);
    bool second = false;
    for (std::size_t i = 0; i < gold.size(); ++i) second |= rank_of(ranking[i], gold[i]) == 2;
    CHECK_MESSAGE(second, item.id);
  }
  CHECK(rep.oracle_coverage() == 1.0);
}

TEST_CASE("oracle rankings keep every gold reading of the mini-treebank") {
  const auto& g = support::learner();
  std::vector<coach::TestItem> items;
  std::vector<std::string> gold;
  for (const auto& t : treebank()) {
    items.push_back({t.id, t.sentence, coach::Expected::grammatical});
    gold.push_back(t.derivation);
  }
  auto rep = properties::evaluate_supertagger(g, items, bundled(), 1, gold);
  CHECK(rep.items == 40);
  CHECK(rep.gold_kept_oracle == 40);
}
