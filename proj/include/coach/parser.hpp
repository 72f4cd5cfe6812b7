#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "coach/derivation.hpp"
#include "coach/grammar.hpp"
#include "coach/morph.hpp"
#include "coach/semantics.hpp"
#include "coach/supertagger.hpp"
#include "coach/unify.hpp"

namespace coach {

struct LearnerUse {
  std::string rule;
  std::size_t start = 0;
  std::size_t end = 0;
  auto operator<=>(const LearnerUse&) const = default;
};

struct Edge {
  std::size_t start = 0;
  std::size_t end = 0;
  FeatureStructure fs;
  std::string rule;  // phrasal rule id, or the lexical entry id for lexical edges
  bool lexical = false;
  std::vector<std::size_t> children;    // chart indices
  std::vector<std::string> lex_rules;   // lexical edges: rule chain
  std::string signature;                // lexical edges
  std::set<LearnerUse> learner_uses;
  std::size_t unary_depth = 0;
  std::string filter_key;  // "lex:<type>" or "rule:<id>"
};

struct ParseStats {
  std::size_t edges_built = 0;
  std::size_t unification_attempts = 0;
  std::size_t unification_failures = 0;
  std::size_t filter_prunes_rule = 0;
  std::size_t filter_prunes_supertag = 0;
  std::size_t readings_found = 0;  // before the cap
  double wall_time_ms = 0;
  std::vector<std::size_t> gaps;   // token positions without lexical edges
};

struct Reading {
  FeatureStructure fs;
  DerivationNode derivation;
  std::string derivation_string;
  std::size_t node_count = 0;
  std::set<LearnerUse> learner_uses;
  MrsLite semantics;
};

// Ranking key: fewer learner uses, then fewer derivation nodes, then the
// canonical derivation string.
bool reading_less(const Reading& a, const Reading& b);

struct ParseResult {
  std::string sentence;
  std::vector<Token> tokens;
  std::vector<Reading> readings;
  ParseStats stats;
};

struct ParseOptions {
  bool rule_filter = true;
  std::size_t reading_cap = 64;
  std::size_t max_len = 30;
  std::size_t max_chain = kMaxChain;
  // Supertag filtering is active when k > 0 and either a model or a fixed
  // ranking is supplied; a fixed ranking wins.
  std::size_t supertag_k = 0;
  const SupertagModel* supertag_model = nullptr;
  const std::vector<TokenRanking>* supertag_ranking = nullptr;
};

// Static compatibility table over (rule, daughter position, candidate).
// Candidates are lexical types ("lex:<type>") and rule mothers
// ("rule:<id>"). An entry is false only when the candidate's constraint
// cannot unify with the daughter schema, comparing both without RELS and
// LEARNER (which mothers compute outside the rule).
class RuleFilter {
 public:
  RuleFilter() = default;
  static RuleFilter build(const Grammar& g);
  static RuleFilter disabled() { return RuleFilter(); }

  bool enabled() const { return enabled_; }
  bool allows(std::size_t rule, std::size_t daughter, const std::string& candidate) const;
  std::size_t size() const { return table_.size(); }
  std::size_t blocked() const;

 private:
  bool enabled_ = false;
  std::map<std::tuple<std::size_t, std::size_t, std::string>, bool> table_;
};

// Builds the mother of `rule` over daughter structures: the rule unified
// with each daughter at its ARGS position, ARGS removed, RELS the
// concatenation of the daughters' RELS, LEARNER + iff a daughter has
// LEARNER + or the rule is a learner rule.
std::optional<FeatureStructure> build_mother(const PhrasalRule& rule, std::span<const FeatureStructure* const> daughters,
                                             const Grammar& g, UnifyFailure* failure = nullptr);

// Applies `rule` to chart edges. Daughters must be adjacent and in order and
// match the rule's arity (PreconditionError otherwise).
std::optional<Edge> apply_rule(const PhrasalRule& rule, std::span<const Edge* const> daughters, const Grammar& g,
                               UnifyFailure* failure = nullptr);

class Parser {
 public:
  explicit Parser(const Grammar& g);
  const Grammar& grammar() const { return *g_; }
  const RuleFilter& rule_filter() const { return filter_; }

  ParseResult parse(const std::vector<Token>& tokens, const ParseOptions& opts = {}) const;
  ParseResult parse(const std::string& sentence, const ParseOptions& opts = {}) const;

 private:
  const Grammar* g_;
  RuleFilter filter_;
};

ParseResult parse(const std::vector<std::string>& forms, const Grammar& g, const ParseOptions& opts = {});

// Lexical edges per token as the parser sees them, before supertag filtering.
std::vector<std::vector<LexicalEdge>> sentence_lexical_edges(const std::vector<Token>& tokens, const Grammar& g,
                                                             std::size_t max_chain = kMaxChain);

}  // namespace coach
