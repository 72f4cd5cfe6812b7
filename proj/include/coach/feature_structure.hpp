#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coach/type_hierarchy.hpp"

namespace coach {

using NodeId = std::uint32_t;
using Path = std::vector<std::string>;

std::string path_to_string(const Path& path);
// "PNG.GEN" -> {"PNG", "GEN"}; the empty string is the empty path.
Path parse_path(std::string_view dotted);

struct Arc {
  std::string feature;
  NodeId target = 0;
  bool operator==(const Arc&) const = default;
};

// A rooted, typed, feature-labelled DAG. Instances are always stored in
// canonical form: nodes numbered in pre-order with arcs sorted by feature, so
// two structures are isomorphic exactly when they compare equal.
class FeatureStructure {
 public:
  struct Node {
    TypeId type = 0;
    std::vector<Arc> arcs;  // sorted by feature, unique
    bool operator==(const Node&) const = default;
  };

  FeatureStructure() : nodes_(1) {}
  explicit FeatureStructure(TypeId root_type) : nodes_{Node{root_type, {}}} {}

  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId n) const { return nodes_.at(n); }
  TypeId type(NodeId n = 0) const { return nodes_.at(n).type; }

  std::optional<NodeId> follow(NodeId from, std::string_view feature) const;
  std::optional<NodeId> at(const Path& path, NodeId from = 0) const;
  std::optional<TypeId> type_at(const Path& path) const;

  // The substructure rooted at `n`, re-canonicalised.
  FeatureStructure sub(NodeId n) const;
  // Copy without the given root-level features (and anything only reachable
  // through them).
  FeatureStructure without(std::span<const std::string> root_features) const;

  // One line per path in lexicographic path order. A node reachable by more
  // than one path is tagged on first visit (`PATH = #n type`) and referenced
  // afterwards (`PATH = #n`). The root path prints as `.`.
  std::string canonical(const TypeHierarchy& h) const;

  bool operator==(const FeatureStructure&) const = default;

 private:
  friend class FsGraph;
  std::vector<Node> nodes_;
};

// Checks the structural invariants: canonical numbering, rooted and
// connected, acyclic, one arc per feature, list nodes carry only FIRST/REST.
// Returns a description of the first violation.
std::optional<std::string> check_invariants(const FeatureStructure& fs, const TypeHierarchy& h);

// Builds a closed list of the given elements (each copied independently).
FeatureStructure make_list(std::span<const FeatureStructure> elements, const TypeHierarchy& h);

}  // namespace coach
