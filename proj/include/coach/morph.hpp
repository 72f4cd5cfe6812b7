#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "coach/feature_structure.hpp"
#include "coach/grammar.hpp"

namespace coach {

inline constexpr std::size_t kMaxChain = 3;

struct Token {
  std::string text;  // as written, punctuation stripped
  std::string form;  // lookup form: lowercased when that form is in the lexicon
  std::size_t start = 0;  // code-point offsets of `text` in the sentence
  std::size_t end = 0;
};

// Whitespace split; strips leading ¿¡"'( and trailing .,;:!?"') punctuation.
std::vector<Token> tokenize(std::string_view sentence, const Grammar& g);

// Lowercases ASCII and the Spanish accented capitals.
std::string to_lower(std::string_view text);
std::size_t codepoint_count(std::string_view text);

struct MorphAnalysis {
  std::string token;
  std::string lemma;
  std::string tag;
  std::string source = "lexicon";
};

// True for tags of the toy EAGLES-style tagset (NCFP000, AQ0MP0, DA0FS0, ...).
bool valid_tag(std::string_view tag);

std::vector<MorphAnalysis> analyze_token(std::string_view token, const Grammar& g);

struct LexicalEdge {
  const LexicalEntry* entry = nullptr;
  std::vector<std::string> rules;  // lexical rule chain, in application order
  bool learner = false;
  FeatureStructure fs;

  // Lexical type plus the rule chain, e.g. "adj-lex+adj-fem-pl-lr".
  std::string signature() const;
};

// One edge per matching entry and admissible rule chain. A chain starts with
// exactly one rule triggered by the analysis tag (when the grammar has any
// for that tag), followed by optional untagged rules, at most `max_chain`
// rules in all. LEARNER is + iff a learner rule was used.
std::vector<LexicalEdge> lexical_edges(const MorphAnalysis& analysis, const Grammar& g,
                                       std::size_t max_chain = kMaxChain);

// All lexical edges for a token form (every analysis).
std::vector<LexicalEdge> token_edges(std::string_view form, const Grammar& g, std::size_t max_chain = kMaxChain);

}  // namespace coach
