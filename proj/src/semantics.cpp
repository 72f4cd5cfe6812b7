#include "coach/semantics.hpp"

#include <utility>
#include <set>

#include "coach/errors.hpp"

namespace coach {

namespace {

class VariableNamer {
 public:
  VariableNamer(const FeatureStructure& fs, const TypeHierarchy& h) : fs_(fs), h_(h) {
    event_ = h.find("event");
    ref_ = h.find("ref-ind");
  }

  std::string name(NodeId n) {
    auto it = names_.find(n);
    if (it != names_.end()) return it->second;
    const TypeId t = fs_.type(n);
    char prefix = 'u';
    if (event_ && h_.subsumes(*event_, t)) prefix = 'e';
    if (ref_ && h_.subsumes(*ref_, t)) prefix = 'x';
    std::string v = prefix + std::to_string(++counter_);
    names_.emplace(n, v);
    return v;
  }

 private:
  const FeatureStructure& fs_;
  const TypeHierarchy& h_;
  std::optional<TypeId> event_;
  std::optional<TypeId> ref_;
  std::map<NodeId, std::string> names_;
  int counter_ = 0;
};

}  // namespace

MrsLite extract_mrs(const FeatureStructure& fs, const TypeHierarchy& h) {
  MrsLite m;
  VariableNamer namer(fs, h);
  auto rels = fs.at({"RELS"});
  if (!rels) throw InternalError("semantics: structure has no RELS list");
  const auto null_type = h.find(kNullType);
  NodeId cell = *rels;
  Path where{"RELS"};
  for (std::size_t guard = 0; guard <= fs.size(); ++guard) {
    auto first = fs.follow(cell, "FIRST");
    auto rest = fs.follow(cell, "REST");
    if (!first && !rest) {
      if (!null_type || !h.subsumes(*null_type, fs.type(cell))) {
        throw InternalError("semantics: RELS list is not closed at " + path_to_string(where));
      }
      break;
    }
    if (!first || !rest) throw InternalError("semantics: malformed RELS cell at " + path_to_string(where));
    Predication p;
    auto pred = fs.follow(*first, "PRED");
    if (pred && TypeHierarchy::is_string_literal(h.name(fs.type(*pred)))) {
      p.predicate = TypeHierarchy::literal_value(h.name(fs.type(*pred)));
    } else {
      throw InternalError("semantics: predication without a PRED string at " + path_to_string(where) + ".FIRST");
    }
    auto arg0 = fs.follow(*first, "ARG0");
    if (!arg0) throw InternalError("semantics: predication without ARG0 at " + path_to_string(where) + ".FIRST");
    p.intrinsic = namer.name(*arg0);
    for (const auto& role : kRoles) {
      if (auto a = fs.follow(*first, role)) p.args.emplace(role, namer.name(*a));
    }
    if (auto png = fs.follow(*first, "PNG")) {
      if (auto pn = fs.follow(*png, "PERNUM")) p.pernum = h.name(fs.type(*pn));
      if (auto gen = fs.follow(*png, "GEN")) p.gender = h.name(fs.type(*gen));
    }
    m.rels.push_back(std::move(p));
    cell = *rest;
    where.push_back("REST");
  }
  if (auto index = fs.at({"INDEX"})) m.index = namer.name(*index);
  std::set<std::string> intrinsic;
  for (const auto& p : m.rels) intrinsic.insert(p.intrinsic);
  std::set<std::string> unbound;
  for (const auto& p : m.rels) {
    for (const auto& [role, v] : p.args) {
      if (!intrinsic.count(v)) unbound.insert(v);
    }
  }
  m.unbound.assign(unbound.begin(), unbound.end());
  return m;
}

std::string MrsLite::to_string() const {
  std::string out = "INDEX: " + (index.empty() ? std::string("-") : index) + "\n";
  for (const auto& p : rels) {
    out += p.predicate + "(" + p.intrinsic;
    for (const auto& [role, v] : p.args) out += ", " + role + " " + v;
    out += ")";
    if (p.pernum || p.gender) {
      out += " [";
      if (p.pernum) out += "PERNUM " + *p.pernum;
      if (p.pernum && p.gender) out += ", ";
      if (p.gender) out += "GEN " + *p.gender;
      out += "]";
    }
    out += "\n";
  }
  return out;
}

DependencyGraph to_dependencies(const MrsLite& m) {
  DependencyGraph d;
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < m.rels.size(); ++i) {
    d.nodes.push_back(m.rels[i].predicate);
    owner.emplace(m.rels[i].intrinsic, i);
  }
  for (std::size_t i = 0; i < m.rels.size(); ++i) {
    for (const auto& role : kRoles) {
      auto a = m.rels[i].args.find(role);
      if (a == m.rels[i].args.end()) continue;
      auto o = owner.find(a->second);
      if (o == owner.end()) continue;
      d.arcs.push_back({i, role, o->second});
    }
  }
  auto idx = owner.find(m.index);
  if (idx != owner.end()) d.index = d.nodes[idx->second];
  return d;
}

std::string format_dependencies(const DependencyGraph& d, const MrsLite& m) {
  std::string out = "# index: " + (d.index.empty() ? (m.index.empty() ? std::string("-") : m.index) : d.index) + "\n";
  for (const auto& a : d.arcs) out += d.nodes[a.head] + " -" + a.role + "-> " + d.nodes[a.dependent] + "\n";
  return out;
}

}  // namespace coach
