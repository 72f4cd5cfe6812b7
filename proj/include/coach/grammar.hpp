#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coach/feature_structure.hpp"
#include "coach/type_hierarchy.hpp"

namespace coach {

enum class GrammarMode { strict, learner };
std::string_view to_string(GrammarMode mode);
GrammarMode parse_mode(std::string_view text);

enum class Severity { advisory, error };
std::string_view to_string(Severity s);

// Load failure. `kind` is one of syntax, hierarchy, constraint, reference,
// definition, io; `location` is file:line:col when known.
class GrammarError : public std::runtime_error {
 public:
  GrammarError(std::string kind, std::string location, std::string detail);
  const std::string& kind() const { return kind_; }
  const std::string& location() const { return location_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string kind_;
  std::string location_;
  std::string detail_;
};

struct LexicalEntry {
  std::string id;
  std::string lemma;
  std::string surface;
  std::string lex_type;
  std::string predicate;
  std::string paradigm_key;
  std::string tag;
  FeatureStructure fs;
};

struct LexicalRule {
  std::string id;
  std::string trigger_tag;  // empty: applies to any input
  FeatureStructure input_schema;
  FeatureStructure output_schema;
  FeatureStructure body;  // INPUT and OUTPUT unified at a common root
  bool learner = false;
  std::optional<std::string> feedback_key;
};

struct PhrasalRule {
  std::string id;
  std::size_t arity = 0;
  FeatureStructure fs;  // full rule, daughters under ARGS
  FeatureStructure mother_schema;
  std::vector<FeatureStructure> daughter_schemas;
  std::size_t head_index = 0;
  bool learner = false;
  std::optional<std::string> feedback_key;
};

struct FeedbackTemplate {
  std::string name;
  std::string category;
  std::string message;  // placeholders: {surface} {expected} {head}
  Severity severity = Severity::error;

  std::string render(const std::map<std::string, std::string>& values) const;
};

struct Grammar {
  TypeHierarchy hierarchy;
  std::map<std::string, FeatureStructure> constraints;  // local, as declared
  std::map<std::string, FeatureStructure> expanded;     // after inheritance closure
  std::map<std::string, std::vector<LexicalEntry>> lexicon;  // keyed by surface
  std::vector<LexicalRule> lexical_rules;
  std::vector<PhrasalRule> phrasal_rules;
  FeatureStructure root;
  std::map<std::string, FeedbackTemplate> feedback_templates;
  std::string version_label;
  GrammarMode mode = GrammarMode::strict;

  const LexicalEntry* entry(std::string_view id) const;
  const LexicalRule* lexical_rule(std::string_view id) const;
  const PhrasalRule* phrasal_rule(std::string_view id) const;
  std::size_t lexicon_size() const;
  std::size_t learner_rule_count() const;
};

// Returns the text of an included file given the including file's name and
// the include argument.
using IncludeResolver = std::function<std::string(const std::string& from, const std::string& target)>;

Grammar load_grammar(std::string_view source, GrammarMode mode, const std::string& name = "<input>",
                     const IncludeResolver& resolver = {});
Grammar load_grammar_file(const std::filesystem::path& path, GrammarMode mode);

// Recomputes `expanded` from `constraints`: each type's effective constraint
// is its local constraint unified with the effective constraints of all its
// parents. Throws GrammarError(constraint) naming type and failing path.
Grammar expand_constraints(Grammar g);

// Grammar text that reloads to an isomorphic grammar (includes flattened,
// constraints written in expanded form).
std::string write_grammar(const Grammar& g);

// Directory holding the bundled toy grammars and fixtures.
std::filesystem::path data_dir();
// "toy" and "toy-underconstrained" name bundled grammars; anything else is a path.
std::filesystem::path resolve_grammar_path(const std::string& name_or_path);

}  // namespace coach
