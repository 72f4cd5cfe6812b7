#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "coach/grammar.hpp"

namespace coach {

// A node of a derivation tree. Phrasal nodes name a phrasal rule, lexical
// rule nodes a lexical rule, and leaves a lexical entry plus its surface.
struct DerivationNode {
  enum class Kind { phrasal, lexrule, lexeme };
  Kind kind = Kind::lexeme;
  std::string label;  // rule or entry identifier
  std::size_t start = 0;
  std::size_t end = 0;
  bool learner = false;
  std::size_t head_index = 0;  // phrasal nodes
  std::string surface;         // leaves
  std::vector<DerivationNode> children;

  // `(label start end child...)`; leaves are `(entry start end "surface")`
  // and learner rules carry a `~` before their label.
  std::string canonical() const;
  std::size_t node_count() const;
  // Indented tree, one node per line: `label [start,end]`.
  std::string pretty() const;
};

// Parses the canonical form, resolving labels against `g`. Unknown entries
// or rules, and malformed spans, raise InputError.
DerivationNode parse_derivation(std::string_view text, const Grammar& g);

// Leaves in order.
std::vector<const DerivationNode*> derivation_leaves(const DerivationNode& root);

}  // namespace coach
