#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coach/morph.hpp"
#include "coach/parser.hpp"
#include "coach/profiler.hpp"
#include "coach/supertagger.hpp"
#include "coach/unify.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

namespace properties {

struct AlgebraReport {
  std::size_t pairs = 0;
  std::size_t unified = 0;  // pairs whose unification succeeded
  std::size_t triples = 0;  // associativity triples checked
  std::vector<std::string> failures;

  void fail(std::size_t i, const std::string& what) { failures.push_back("pair " + std::to_string(i) + ": " + what); }
};

inline bool same_outcome(const coach::UnifyResult& x, const coach::UnifyResult& y) {
  if (static_cast<bool>(x) != static_cast<bool>(y)) return false;
  return !x || *x == *y;
}

// Idempotence, commutativity, failure symmetry, absorption, agreement with
// the path-closure oracle, subsumption agreement, invariants of results,
// unchanged inputs and associativity, over random pairs.
inline AlgebraReport check_algebra(const coach::TypeHierarchy& h, std::size_t pairs, std::uint64_t seed) {
  AlgebraReport rep;
  support::RandomFs gen(h, seed);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto a = gen.next();
    const auto b = gen.next();
    const auto a_copy = a, b_copy = b;
    ++rep.pairs;

    auto aa = coach::unify(a, a, h);
    if (!aa || *aa != a) rep.fail(i, "idempotence");

    auto ab = coach::unify(a, b, h);
    auto ba = coach::unify(b, a, h);
    if (static_cast<bool>(ab) != static_cast<bool>(ba)) rep.fail(i, "failure symmetry");
    else if (ab && *ab != *ba) rep.fail(i, "commutativity");

    if (a != a_copy || b != b_copy) rep.fail(i, "inputs changed");

    auto closure = oracle::unify_closure(a, b, h);
    if (static_cast<bool>(ab) != closure.has_value()) {
      rep.fail(i, std::string("oracle disagrees on success: engine ") + (ab ? "unified" : ab.failure.describe()));
    } else if (ab) {
      auto d = oracle::describe(*ab);
      if (d.types != closure->types || d.shared != closure->shared) rep.fail(i, "result is not the most general unifier");
    }

    if (coach::subsumes(a, b, h) != oracle::subsumes(a, b, h)) rep.fail(i, "subsumption disagrees with oracle");

    if (oracle::subsumes(a, b, h)) {
      if (!ab || *ab != b) rep.fail(i, "absorption (a subsumes b)");
    }
    if (ab) {
      ++rep.unified;
      if (auto bad = coach::check_invariants(*ab, h)) rep.fail(i, "invariant: " + *bad);
      if (!oracle::subsumes(a, *ab, h) || !oracle::subsumes(b, *ab, h)) rep.fail(i, "result not below both inputs");
      auto absorbed = coach::unify(a, *ab, h);
      if (!absorbed || *absorbed != *ab) rep.fail(i, "absorption (a with a unified with b)");

      const auto c = gen.next();
      auto ab_c = coach::unify(*ab, c, h);
      auto bc = coach::unify(b, c, h);
      auto ac = coach::unify(a, c, h);
      if (ab_c && bc && ac) {
        ++rep.triples;
        auto a_bc = coach::unify(a, *bc, h);
        if (!a_bc || *a_bc != *ab_c) rep.fail(i, "associativity");
      }
    }
  }
  return rep;
}

// The single strict-mode lexical structure of a form.
inline coach::FeatureStructure strict_lexical(const coach::Grammar& g, const std::string& form) {
  auto edges = coach::token_edges(form, g);
  if (edges.size() != 1) throw std::runtime_error("expected one lexical edge for " + form);
  return edges.front().fs;
}

// Unifies the adjective's MOD element with the noun and reports the outcome
// as seen from the noun (the failing path is relative to the noun).
inline coach::UnifyResult noun_with_modifier(const coach::Grammar& g, const std::string& noun,
                                             const std::string& adjective) {
  auto n = strict_lexical(g, noun);
  auto adj = strict_lexical(g, adjective);
  auto mod = adj.sub(*adj.at({"MOD", "FIRST"}));
  return coach::unify(n, mod, g.hierarchy);
}

// Canonical derivation strings of all readings.
inline std::set<std::string> derivations(const coach::ParseResult& r) {
  std::set<std::string> out;
  for (const auto& rd : r.readings) out.insert(rd.derivation_string);
  return out;
}

inline coach::ParseOptions uncapped(bool rule_filter) {
  coach::ParseOptions o;
  o.rule_filter = rule_filter;
  o.reading_cap = 1u << 20;
  return o;
}

// Chart readings against the exhaustive enumeration, with and without the
// rule filter, for every item of at most `max_tokens` tokens.
struct EquivalenceReport {
  std::size_t sentences = 0;
  std::size_t readings = 0;
  std::vector<std::string> failures;
};

inline void check_equivalence(const coach::Grammar& g, const std::vector<coach::TestItem>& items,
                              std::size_t max_tokens, EquivalenceReport& rep) {
  coach::Parser parser(g);
  for (const auto& item : items) {
    auto tokens = coach::tokenize(item.sentence, g);
    if (tokens.empty() || tokens.size() > max_tokens) continue;
    ++rep.sentences;
    auto expected = oracle::enumerate_readings(tokens, g);
    rep.readings += expected.size();
    for (bool filter : {true, false}) {
      auto r = parser.parse(tokens, uncapped(filter));
      auto got = derivations(r);
      if (got != expected || r.readings.size() != expected.size()) {
        rep.failures.push_back(item.id + " (" + std::string(coach::to_string(g.mode)) + ", filter " +
                               (filter ? "on" : "off") + "): chart " + std::to_string(got.size()) + " vs oracle " +
                               std::to_string(expected.size()));
      }
    }
  }
}

// Two argument positions share a variable exactly when their paths reach
// the same node of the reading's structure.
inline std::optional<std::string> reentrancy_violation(const coach::Reading& rd) {
  const auto& fs = rd.fs;
  std::vector<std::pair<coach::NodeId, std::string>> slots;
  auto cell = fs.at({"RELS"});
  if (!cell) return "no RELS";
  std::size_t i = 0;
  while (auto first = fs.follow(*cell, "FIRST")) {
    if (i >= rd.semantics.rels.size()) return "more RELS elements than predications";
    const auto& p = rd.semantics.rels[i];
    slots.emplace_back(*fs.follow(*first, "ARG0"), p.intrinsic);
    for (const auto& role : coach::kRoles) {
      auto n = fs.follow(*first, role);
      auto v = p.args.find(role);
      if (static_cast<bool>(n) != (v != p.args.end())) return "role " + role + " present on one side only";
      if (n) slots.emplace_back(*n, v->second);
    }
    cell = fs.follow(*cell, "REST");
    ++i;
  }
  if (i != rd.semantics.rels.size()) return "fewer RELS elements than predications";
  for (const auto& [n1, v1] : slots) {
    for (const auto& [n2, v2] : slots) {
      if ((n1 == n2) != (v1 == v2)) return "variables " + v1 + " and " + v2 + " disagree with node identity";
    }
  }
  return std::nullopt;
}

// Gold signature first, every other licensed signature after it.
inline std::vector<coach::TokenRanking> oracle_ranking(const std::vector<coach::Token>& tokens,
                                                       const coach::Grammar& g,
                                                       const std::vector<std::string>& gold) {
  auto edges = coach::sentence_lexical_edges(tokens, g);
  std::vector<coach::TokenRanking> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    coach::TokenRanking r = {{gold.at(i), 1.0}};
    std::set<std::string> rest;
    for (const auto& e : edges[i]) {
      if (e.signature() != gold[i]) rest.insert(e.signature());
    }
    for (const auto& sig : rest) r.push_back({sig, 0.0});
    out.push_back(r);
  }
  return out;
}

struct SupertagReport {
  std::size_t items = 0;
  std::size_t edges_unfiltered = 0;
  std::size_t edges_filtered = 0;
  std::size_t attempts_unfiltered = 0;
  std::size_t attempts_filtered = 0;
  std::size_t gold_kept = 0;         // model ranking at k
  std::size_t gold_kept_oracle = 0;  // gold signature forced to rank 1, k = 1
  std::vector<std::string> misses;

  double edge_drop() const {
    return edges_unfiltered ? 1.0 - static_cast<double>(edges_filtered) / static_cast<double>(edges_unfiltered) : 0;
  }
  double coverage() const { return items ? static_cast<double>(gold_kept) / static_cast<double>(items) : 0; }
  double oracle_coverage() const {
    return items ? static_cast<double>(gold_kept_oracle) / static_cast<double>(items) : 0;
  }
};

// The gold reading of an item is its best unfiltered reading, or the given
// derivation when one is supplied. Items without any unfiltered reading are
// skipped.
inline SupertagReport evaluate_supertagger(const coach::Grammar& g, const std::vector<coach::TestItem>& items,
                                           const coach::SupertagModel& model, std::size_t k,
                                           const std::vector<std::string>& gold_derivations = {}) {
  SupertagReport rep;
  coach::Parser parser(g);
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto tokens = coach::tokenize(items[i].sentence, g);
    auto base = parser.parse(tokens, uncapped(true));
    std::string gold;
    if (!gold_derivations.empty()) {
      gold = gold_derivations.at(i);
    } else if (!base.readings.empty()) {
      gold = base.readings.front().derivation_string;
    } else {
      continue;
    }
    ++rep.items;
    auto opts = uncapped(true);
    opts.supertag_k = k;
    opts.supertag_model = &model;
    auto filtered = parser.parse(tokens, opts);
    rep.edges_unfiltered += base.stats.edges_built;
    rep.edges_filtered += filtered.stats.edges_built;
    rep.attempts_unfiltered += base.stats.unification_attempts;
    rep.attempts_filtered += filtered.stats.unification_attempts;
    if (derivations(filtered).count(gold)) ++rep.gold_kept;
    else rep.misses.push_back(items[i].id);

    auto ranking = oracle_ranking(tokens, g, coach::gold_signatures(gold, g));
    auto oracle_opts = uncapped(true);
    oracle_opts.supertag_k = 1;
    oracle_opts.supertag_ranking = &ranking;
    if (derivations(parser.parse(tokens, oracle_opts)).count(gold)) ++rep.gold_kept_oracle;
  }
  return rep;
}

}  // namespace properties
