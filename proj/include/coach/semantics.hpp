#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coach/feature_structure.hpp"
#include "coach/type_hierarchy.hpp"

namespace coach {

// Roles read from a predication, in this order.
inline const std::vector<std::string> kRoles = {"ARG1", "ARG2", "ARG3", "ARG4"};

struct Predication {
  std::string predicate;
  std::string intrinsic;                     // ARG0 variable
  std::map<std::string, std::string> args;   // role -> variable
  std::optional<std::string> pernum;
  std::optional<std::string> gender;
};

struct MrsLite {
  std::vector<Predication> rels;
  std::string index;                 // empty when the structure has no INDEX
  std::vector<std::string> unbound;  // argument variables no predication introduces

  std::string to_string() const;
};

// Reads RELS in order. Variables are named by the type of their node (e for
// events, x for referential indices, u otherwise) and numbered by first
// appearance, so shared nodes give the same variable.
MrsLite extract_mrs(const FeatureStructure& fs, const TypeHierarchy& h);

struct DependencyArc {
  std::size_t head = 0;       // index into nodes
  std::string role;
  std::size_t dependent = 0;  // index into nodes
};

struct DependencyGraph {
  std::vector<std::string> nodes;  // predicate labels, in rels order
  std::vector<DependencyArc> arcs;
  std::string index;
};

// One arc per role whose variable is some predication's intrinsic variable
// (the first such predication in rels order).
DependencyGraph to_dependencies(const MrsLite& m);

// `# index: <pred>` header, then `head_pred -ROLE-> dep_pred` per line.
std::string format_dependencies(const DependencyGraph& d, const MrsLite& m);

}  // namespace coach
