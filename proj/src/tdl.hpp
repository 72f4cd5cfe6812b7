#pragma once

// Reader for the line-oriented TDL-like grammar format.
//
//   ; comment
//   %include "other.tdl"
//   %types | %lexicon | %lexrules | %rules | %root | %feedback
//   name := parent & [ PATH value, PATH #tag & type, LIST < a, b, ... > ] @key value.
//
// Bare `PATH value` conjuncts are accepted at the top level
// (`w := noun-lex & STEM "casa" & KEYREL.PRED "_casa_n".`).

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coach/feature_structure.hpp"

namespace coach::tdl {

struct Location {
  std::string file;
  int line = 0;
  int column = 0;
  std::string str() const;
};

struct AvmItem;

struct Term {
  enum class Kind { type, string, tag, avm, list, conj };
  Kind kind = Kind::conj;
  std::string text;             // type name, string literal, or tag name
  std::vector<AvmItem> avm;     // avm: feature/value pairs
  std::vector<Term> items;      // list elements or conjuncts
  bool open_list = false;       // `< a, ... >`
  Location where;
};

struct AvmItem {
  Path path;
  Term value;
};

struct Definition {
  std::string section;
  std::string name;
  Term body;  // conj, possibly empty
  std::map<std::string, std::string> annotations;  // @learner -> ""
  Location where;
};

// Thrown for lexical and syntactic errors.
struct SyntaxError {
  Location where;
  std::string message;
};

// Called for `%include "target"`; returns the included definitions, parsed
// starting in `section`.
using IncludeHandler =
    std::function<std::vector<Definition>(const std::string& target, const std::string& section, const Location&)>;

std::vector<Definition> parse(std::string_view text, const std::string& file, const std::string& initial_section,
                              const IncludeHandler& on_include);

}  // namespace coach::tdl
