#include "coach/unify.hpp"

#include <algorithm>
#include <deque>

#include "coach/errors.hpp"

namespace coach {

std::string UnifyFailure::describe() const {
  const std::string where = path.empty() ? std::string("<root>") : path_to_string(path);
  if (cycle) return "cyclic structure at " + where;
  return "type clash at " + where + ": " + left + " vs " + right;
}

NodeId FsGraph::add_node(TypeId type) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({type, id, {}});
  return id;
}

NodeId FsGraph::add(const FeatureStructure& fs) {
  const NodeId base = static_cast<NodeId>(nodes_.size());
  for (const auto& n : fs.nodes()) {
    Node copy{n.type, static_cast<NodeId>(nodes_.size()), n.arcs};
    for (auto& a : copy.arcs) a.target += base;
    nodes_.push_back(std::move(copy));
  }
  return base;
}

NodeId FsGraph::find(NodeId n) {
  NodeId r = n;
  while (nodes_[r].parent != r) r = nodes_[r].parent;
  while (nodes_[n].parent != r) {
    NodeId next = nodes_[n].parent;
    nodes_[n].parent = r;
    n = next;
  }
  return r;
}

namespace {

auto arc_position(std::vector<Arc>& arcs, std::string_view feature) {
  return std::lower_bound(arcs.begin(), arcs.end(), feature,
                          [](const Arc& a, std::string_view f) { return a.feature < f; });
}

}  // namespace

std::optional<NodeId> FsGraph::follow(NodeId from, std::string_view feature) {
  auto& arcs = nodes_[find(from)].arcs;
  auto it = arc_position(arcs, feature);
  if (it == arcs.end() || it->feature != feature) return std::nullopt;
  return it->target;
}

std::optional<NodeId> FsGraph::at(NodeId from, const Path& path) {
  NodeId n = from;
  for (const auto& f : path) {
    auto next = follow(n, f);
    if (!next) return std::nullopt;
    n = *next;
  }
  return find(n);
}

NodeId FsGraph::ensure_path(NodeId from, const Path& path) {
  NodeId n = find(from);
  for (const auto& f : path) {
    auto next = follow(n, f);
    if (!next) {
      NodeId fresh = add_node(h_->top());
      set_arc(n, f, fresh);
      next = fresh;
    }
    n = find(*next);
  }
  return n;
}

void FsGraph::set_arc(NodeId from, const std::string& feature, NodeId to) {
  auto& arcs = nodes_[find(from)].arcs;
  auto it = arc_position(arcs, feature);
  if (it != arcs.end() && it->feature == feature) {
    it->target = to;
  } else {
    arcs.insert(it, Arc{feature, to});
  }
}

void FsGraph::remove_arc(NodeId from, std::string_view feature) {
  auto& arcs = nodes_[find(from)].arcs;
  auto it = arc_position(arcs, feature);
  if (it != arcs.end() && it->feature == feature) arcs.erase(it);
}

bool FsGraph::unify(NodeId a, NodeId b, const Path& where) {
  struct Pending {
    NodeId x;
    NodeId y;
    std::int64_t path;  // index into steps, -1 for `where`
  };
  std::vector<std::pair<std::int64_t, std::string>> steps;
  auto path_of = [&](std::int64_t idx) {
    Path tail;
    for (; idx >= 0; idx = steps[idx].first) tail.push_back(steps[idx].second);
    Path out = where;
    out.insert(out.end(), tail.rbegin(), tail.rend());
    return out;
  };

  std::deque<Pending> queue{{a, b, -1}};
  while (!queue.empty()) {
    Pending p = queue.front();
    queue.pop_front();
    NodeId rx = find(p.x);
    NodeId ry = find(p.y);
    if (rx == ry) continue;
    auto g = h_->glb(nodes_[rx].type, nodes_[ry].type);
    if (!g) {
      failure_ = {path_of(p.path), h_->name(nodes_[rx].type), h_->name(nodes_[ry].type), false};
      return false;
    }
    nodes_[ry].parent = rx;
    nodes_[rx].type = *g;
    std::vector<Arc> moved = std::move(nodes_[ry].arcs);
    nodes_[ry].arcs.clear();
    for (auto& arc : moved) {
      auto& xarcs = nodes_[rx].arcs;
      auto it = arc_position(xarcs, arc.feature);
      if (it != xarcs.end() && it->feature == arc.feature) {
        steps.emplace_back(p.path, arc.feature);
        queue.push_back({it->target, arc.target, static_cast<std::int64_t>(steps.size() - 1)});
      } else {
        xarcs.insert(it, std::move(arc));
      }
    }
  }
  return true;
}

bool FsGraph::constrain(NodeId n, TypeId t, const Path& where) {
  NodeId r = find(n);
  auto g = h_->glb(nodes_[r].type, t);
  if (!g) {
    failure_ = {where, h_->name(nodes_[r].type), h_->name(t), false};
    return false;
  }
  nodes_[r].type = *g;
  return true;
}

std::optional<FeatureStructure> FsGraph::extract(NodeId root) {
  std::vector<std::int64_t> map(nodes_.size(), -1);
  std::vector<char> on_stack(nodes_.size(), 0);
  FeatureStructure out;
  out.nodes_.clear();
  Path path;
  bool cyclic = false;
  auto visit = [&](auto&& self, NodeId n) -> NodeId {
    n = find(n);
    NodeId id = static_cast<NodeId>(out.nodes_.size());
    map[n] = id;
    on_stack[n] = 1;
    out.nodes_.push_back({nodes_[n].type, {}});
    const std::vector<Arc> arcs = nodes_[n].arcs;
    for (const auto& arc : arcs) {
      if (cyclic) break;
      NodeId t = find(arc.target);
      path.push_back(arc.feature);
      if (on_stack[t]) {
        cyclic = true;
        failure_ = {path, {}, {}, true};
        break;
      }
      NodeId child = map[t] >= 0 ? static_cast<NodeId>(map[t]) : self(self, t);
      if (cyclic) break;
      out.nodes_[id].arcs.push_back({arc.feature, child});
      path.pop_back();
    }
    on_stack[n] = 0;
    return id;
  };
  visit(visit, root);
  if (cyclic) return std::nullopt;
  return out;
}

std::vector<NodeId> FsGraph::list_elements(NodeId list) {
  const TypeId null_type = h_->id(kNullType);
  std::vector<NodeId> out;
  NodeId n = find(list);
  for (std::size_t guard = 0; guard <= nodes_.size(); ++guard) {
    auto first = follow(n, "FIRST");
    auto rest = follow(n, "REST");
    if (!first && !rest && h_->subsumes(null_type, nodes_[n].type)) return out;
    if (!first || !rest) {
      throw InputError("list is not null-terminated (element " + std::to_string(out.size()) + " has type " +
                       h_->name(nodes_[n].type) + ")");
    }
    out.push_back(find(*first));
    n = find(*rest);
  }
  throw InputError("list is cyclic");
}

NodeId FsGraph::list_append(NodeId xs, NodeId ys) {
  const auto elements = list_elements(xs);
  const TypeId cons = h_->id(kConsType);
  NodeId tail = ys;
  for (auto it = elements.rbegin(); it != elements.rend(); ++it) {
    NodeId cell = add_node(cons);
    set_arc(cell, "FIRST", *it);
    set_arc(cell, "REST", tail);
    tail = cell;
  }
  return tail;
}

UnifyResult unify(const FeatureStructure& a, const FeatureStructure& b, const TypeHierarchy& h) {
  return unify_at(a, {}, b, h);
}

UnifyResult unify_at(const FeatureStructure& host, const Path& path, const FeatureStructure& guest,
                     const TypeHierarchy& h) {
  FsGraph g(h);
  NodeId host_root = g.add(host);
  NodeId guest_root = g.add(guest);
  NodeId target = g.ensure_path(host_root, path);
  UnifyResult result;
  if (!g.unify(target, guest_root, path)) {
    result.failure = g.failure();
    return result;
  }
  result.fs = g.extract(host_root);
  if (!result.fs) result.failure = g.failure();
  return result;
}

bool subsumes(const FeatureStructure& general, const FeatureStructure& specific, const TypeHierarchy& h) {
  std::vector<std::int64_t> image(general.size(), -1);
  auto visit = [&](auto&& self, NodeId g, NodeId s) -> bool {
    if (image[g] >= 0) return static_cast<NodeId>(image[g]) == s;
    image[g] = s;
    if (!h.subsumes(general.type(g), specific.type(s))) return false;
    for (const auto& arc : general.node(g).arcs) {
      auto next = specific.follow(s, arc.feature);
      if (!next || !self(self, arc.target, *next)) return false;
    }
    return true;
  };
  return visit(visit, general.root(), specific.root());
}

FeatureStructure list_append(const FeatureStructure& xs, const FeatureStructure& ys, const TypeHierarchy& h) {
  FsGraph g(h);
  NodeId x = g.add(xs);
  NodeId y = g.add(ys);
  return *g.extract(g.list_append(x, y));
}

FeatureStructure list_append(const FeatureStructure& host, const Path& xs, const Path& ys,
                             const TypeHierarchy& h) {
  FsGraph g(h);
  NodeId root = g.add(host);
  auto x = g.at(root, xs);
  auto y = g.at(root, ys);
  if (!x || !y) throw InputError("list_append: path not present in host structure");
  return *g.extract(g.list_append(*x, *y));
}

}  // namespace coach
