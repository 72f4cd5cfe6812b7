#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coach/feature_structure.hpp"
#include "coach/type_hierarchy.hpp"

namespace coach {

struct UnifyFailure {
  Path path;           // where the clash (or cycle) was found
  std::string left;    // clashing types, in argument order
  std::string right;
  bool cycle = false;  // occurs-check failure rather than a type clash

  std::string describe() const;
};

// Mutable scratch graph with union-find node identity. Structures are copied
// in, merged, edited, and finally extracted as canonical FeatureStructures;
// the inputs are never touched.
class FsGraph {
 public:
  explicit FsGraph(const TypeHierarchy& h) : h_(&h) {}

  const TypeHierarchy& hierarchy() const { return *h_; }

  NodeId add_node(TypeId type);
  // Copies `fs` in and returns the id of its root.
  NodeId add(const FeatureStructure& fs);

  NodeId find(NodeId n);
  // Outgoing arcs of `n`; targets may be non-representative ids.
  const std::vector<Arc>& arcs(NodeId n) { return nodes_[find(n)].arcs; }
  TypeId type(NodeId n) { return nodes_[find(n)].type; }
  std::optional<NodeId> follow(NodeId from, std::string_view feature);
  std::optional<NodeId> at(NodeId from, const Path& path);
  // Follows `path`, creating top-typed nodes where arcs are missing.
  NodeId ensure_path(NodeId from, const Path& path);
  void set_arc(NodeId from, const std::string& feature, NodeId to);
  void remove_arc(NodeId from, std::string_view feature);

  // Makes `a` and `b` the same node. On a type clash returns false and
  // records failure(); the graph is then unusable. `where` prefixes the
  // reported path.
  bool unify(NodeId a, NodeId b, const Path& where = {});
  // Narrows the type of `n` to its GLB with `t`.
  bool constrain(NodeId n, TypeId t, const Path& where = {});

  // Canonical copy of everything reachable from `root`. Returns nullopt and
  // records failure() when the reachable graph is cyclic.
  std::optional<FeatureStructure> extract(NodeId root);

  // Elements of a FIRST/REST list; throws InputError unless null-terminated.
  std::vector<NodeId> list_elements(NodeId list);
  // Fresh cons cells holding the elements of `xs` followed by `ys` itself.
  // Element nodes are shared, not copied.
  NodeId list_append(NodeId xs, NodeId ys);

  const UnifyFailure& failure() const { return failure_; }

 private:
  struct Node {
    TypeId type = 0;
    NodeId parent = 0;
    std::vector<Arc> arcs;
  };

  const TypeHierarchy* h_;
  std::vector<Node> nodes_;
  UnifyFailure failure_;
};

struct UnifyResult {
  std::optional<FeatureStructure> fs;
  UnifyFailure failure;

  explicit operator bool() const { return fs.has_value(); }
  const FeatureStructure& operator*() const { return *fs; }
  const FeatureStructure* operator->() const { return &*fs; }
};

UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b, const TypeHierarchy& h);
// Unifies `guest` into `host` at `path` (created if absent); result rooted at
// the host root.
UnifyResult unify_at(const FeatureStructure& host, const Path& path, const FeatureStructure& guest,
                     const TypeHierarchy& h);

bool subsumes(const FeatureStructure& general, const FeatureStructure& specific, const TypeHierarchy& h);

// `xs` followed by `ys`; the result is rooted at the new list.
FeatureStructure list_append(const FeatureStructure& xs, const FeatureStructure& ys, const TypeHierarchy& h);
// Appends two lists living in the same host structure, so reentrancies
// between their elements survive in the result.
FeatureStructure list_append(const FeatureStructure& host, const Path& xs, const Path& ys,
                             const TypeHierarchy& h);

}  // namespace coach
