#include "coach/feature_structure.hpp"

#include <algorithm>
#include <sstream>

#include "coach/unify.hpp"

namespace coach {

std::string path_to_string(const Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += path[i];
  }
  return out;
}

Path parse_path(std::string_view dotted) {
  Path out;
  while (!dotted.empty()) {
    auto dot = dotted.find('.');
    out.emplace_back(dotted.substr(0, dot));
    if (dot == std::string_view::npos) break;
    dotted.remove_prefix(dot + 1);
  }
  return out;
}

std::optional<NodeId> FeatureStructure::follow(NodeId from, std::string_view feature) const {
  const auto& arcs = nodes_.at(from).arcs;
  auto it = std::lower_bound(arcs.begin(), arcs.end(), feature,
                             [](const Arc& a, std::string_view f) { return a.feature < f; });
  if (it == arcs.end() || it->feature != feature) return std::nullopt;
  return it->target;
}

std::optional<NodeId> FeatureStructure::at(const Path& path, NodeId from) const {
  NodeId n = from;
  for (const auto& f : path) {
    auto next = follow(n, f);
    if (!next) return std::nullopt;
    n = *next;
  }
  return n;
}

std::optional<TypeId> FeatureStructure::type_at(const Path& path) const {
  auto n = at(path);
  if (!n) return std::nullopt;
  return type(*n);
}

namespace {

// Pre-order renumbering of the nodes reachable from `root`, optionally
// skipping some root arcs. Input must be acyclic.
std::vector<FeatureStructure::Node> renumber(const std::vector<FeatureStructure::Node>& in, NodeId root,
                                             std::span<const std::string> skip_root) {
  std::vector<std::int64_t> map(in.size(), -1);
  std::vector<FeatureStructure::Node> out;
  auto visit = [&](auto&& self, NodeId n, bool is_root) -> NodeId {
    if (map[n] >= 0) return static_cast<NodeId>(map[n]);
    NodeId id = static_cast<NodeId>(out.size());
    map[n] = id;
    out.push_back({in[n].type, {}});
    for (const auto& arc : in[n].arcs) {
      if (is_root && std::find(skip_root.begin(), skip_root.end(), arc.feature) != skip_root.end()) continue;
      NodeId t = self(self, arc.target, false);
      out[id].arcs.push_back({arc.feature, t});
    }
    return id;
  };
  visit(visit, root, true);
  return out;
}

}  // namespace

FeatureStructure FeatureStructure::sub(NodeId n) const {
  FeatureStructure out;
  out.nodes_ = renumber(nodes_, n, {});
  return out;
}

FeatureStructure FeatureStructure::without(std::span<const std::string> root_features) const {
  FeatureStructure out;
  out.nodes_ = renumber(nodes_, 0, root_features);
  return out;
}

std::string FeatureStructure::canonical(const TypeHierarchy& h) const {
  std::vector<int> indegree(nodes_.size(), 0);
  for (const auto& n : nodes_) {
    for (const auto& a : n.arcs) ++indegree[a.target];
  }
  std::vector<int> tag(nodes_.size(), 0);
  std::vector<bool> seen(nodes_.size(), false);
  int next_tag = 0;
  std::ostringstream out;
  Path path;
  auto visit = [&](auto&& self, NodeId n) -> void {
    out << (path.empty() ? std::string(".") : path_to_string(path)) << " = ";
    if (seen[n]) {
      out << '#' << tag[n] << '\n';
      return;
    }
    seen[n] = true;
    if (indegree[n] > 1) {
      tag[n] = ++next_tag;
      out << '#' << tag[n] << ' ';
    }
    out << h.name(nodes_[n].type) << '\n';
    for (const auto& a : nodes_[n].arcs) {
      path.push_back(a.feature);
      self(self, a.target);
      path.pop_back();
    }
  };
  visit(visit, 0);
  return out.str();
}

std::optional<std::string> check_invariants(const FeatureStructure& fs, const TypeHierarchy& h) {
  const auto& nodes = fs.nodes();
  if (nodes.empty()) return "no nodes";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].type >= h.size()) return "node " + std::to_string(i) + " has an unknown type";
    const auto& arcs = nodes[i].arcs;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      if (arcs[k].target >= nodes.size()) return "dangling arc";
      if (k && !(arcs[k - 1].feature < arcs[k].feature)) {
        return "node " + std::to_string(i) + " has duplicate or unsorted feature " + arcs[k].feature;
      }
    }
  }
  // Colouring DFS: detects cycles and confirms pre-order numbering.
  std::vector<int> colour(nodes.size(), 0);
  NodeId expected = 0;
  std::optional<std::string> error;
  auto visit = [&](auto&& self, NodeId n) -> void {
    if (error) return;
    if (n != expected) {
      error = "node numbering is not canonical";
      return;
    }
    ++expected;
    colour[n] = 1;
    for (const auto& a : nodes[n].arcs) {
      if (colour[a.target] == 1) {
        error = "cycle through feature " + a.feature;
        return;
      }
      if (colour[a.target] == 0) self(self, a.target);
      if (error) return;
    }
    colour[n] = 2;
  };
  visit(visit, 0);
  if (error) return error;
  if (expected != nodes.size()) return "unreachable nodes";

  auto list = h.find(kListType);
  if (list) {
    for (const auto& n : nodes) {
      if (!h.subsumes(*list, n.type)) continue;
      for (const auto& a : n.arcs) {
        if (a.feature != "FIRST" && a.feature != "REST") {
          return "list node carries feature " + a.feature;
        }
      }
    }
  }
  return std::nullopt;
}

FeatureStructure make_list(std::span<const FeatureStructure> elements, const TypeHierarchy& h) {
  FsGraph g(h);
  NodeId tail = g.add_node(h.id(kNullType));
  for (auto it = elements.rbegin(); it != elements.rend(); ++it) {
    NodeId cell = g.add_node(h.id(kConsType));
    g.set_arc(cell, "FIRST", g.add(*it));
    g.set_arc(cell, "REST", tail);
    tail = cell;
  }
  return *g.extract(tail);
}

}  // namespace coach
