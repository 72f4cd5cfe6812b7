#include "coach/grammar.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "coach/errors.hpp"
#include "coach/unify.hpp"
#include "tdl.hpp"

#ifndef COACH_DATA_DIR
#define COACH_DATA_DIR "data"
#endif

namespace coach {

using tdl::Definition;
using tdl::Location;
using tdl::Term;

GrammarError::GrammarError(std::string kind, std::string location, std::string detail)
    : std::runtime_error(kind + " error" + (location.empty() ? "" : " at " + location) + ": " + detail),
      kind_(std::move(kind)),
      location_(std::move(location)),
      detail_(std::move(detail)) {}

std::string_view to_string(GrammarMode mode) { return mode == GrammarMode::strict ? "strict" : "learner"; }

GrammarMode parse_mode(std::string_view text) {
  if (text == "strict") return GrammarMode::strict;
  if (text == "learner") return GrammarMode::learner;
  throw InputError("unknown grammar mode '" + std::string(text) + "' (expected strict or learner)");
}

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "advisory"; }

std::string FeedbackTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  for (std::size_t i = 0; i < message.size();) {
    if (message[i] == '{') {
      auto close = message.find('}', i);
      if (close != std::string::npos) {
        auto it = values.find(message.substr(i + 1, close - i - 1));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += message[i++];
  }
  return out;
}

const LexicalEntry* Grammar::entry(std::string_view id) const {
  for (const auto& [surface, entries] : lexicon) {
    for (const auto& e : entries) {
      if (e.id == id) return &e;
    }
  }
  return nullptr;
}

const LexicalRule* Grammar::lexical_rule(std::string_view id) const {
  for (const auto& r : lexical_rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

const PhrasalRule* Grammar::phrasal_rule(std::string_view id) const {
  for (const auto& r : phrasal_rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::size_t Grammar::lexicon_size() const {
  std::size_t n = 0;
  for (const auto& [surface, entries] : lexicon) n += entries.size();
  return n;
}

std::size_t Grammar::learner_rule_count() const {
  auto lex = std::count_if(lexical_rules.begin(), lexical_rules.end(), [](const auto& r) { return r.learner; });
  auto phr = std::count_if(phrasal_rules.begin(), phrasal_rules.end(), [](const auto& r) { return r.learner; });
  return static_cast<std::size_t>(lex + phr);
}

namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>> kBuiltinTypes = {
    {std::string(kStringType), {}},
    {std::string(kListType), {}},
    {std::string(kConsType), {std::string(kListType)}},
    {std::string(kNullType), {std::string(kListType)}},
};

std::string hash_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

void collect_strings(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::string) out.insert(t.text);
  for (const auto& item : t.items) collect_strings(item, out);
  for (const auto& item : t.avm) collect_strings(item.value, out);
}

// Instantiates terms into a scratch graph.
class Builder {
 public:
  Builder(const TypeHierarchy& h, const std::map<std::string, FeatureStructure>* expanded)
      : h_(h), expanded_(expanded), graph_(h) {}

  FsGraph& graph() { return graph_; }

  NodeId build(const Term& t) {
    switch (t.kind) {
      case Term::Kind::type:
        return graph_.add_node(lookup(t.text, t.where));
      case Term::Kind::string:
        return graph_.add_node(h_.id(TypeHierarchy::string_type_name(t.text)));
      case Term::Kind::tag: {
        auto it = tags_.find(t.text);
        if (it != tags_.end()) return it->second;
        NodeId n = graph_.add_node(h_.top());
        tags_.emplace(t.text, n);
        return n;
      }
      case Term::Kind::avm: {
        NodeId n = graph_.add_node(h_.top());
        for (const auto& item : t.avm) {
          NodeId target = graph_.ensure_path(n, item.path);
          NodeId value = build(item.value);
          merge(target, value, item.path, item.value.where);
        }
        return n;
      }
      case Term::Kind::list: {
        NodeId tail = graph_.add_node(h_.id(t.open_list ? kListType : kNullType));
        std::vector<NodeId> elements;
        for (const auto& item : t.items) elements.push_back(build(item));
        for (auto it = elements.rbegin(); it != elements.rend(); ++it) {
          NodeId cell = graph_.add_node(h_.id(kConsType));
          graph_.set_arc(cell, "FIRST", *it);
          graph_.set_arc(cell, "REST", tail);
          tail = cell;
        }
        return tail;
      }
      case Term::Kind::conj: {
        NodeId n = graph_.add_node(h_.top());
        for (const auto& item : t.items) {
          NodeId value = build(item);
          merge(n, value, {}, item.where);
        }
        return n;
      }
    }
    throw InternalError("unhandled term kind");
  }

  // Top-level conjunct of an instance: types contribute their expanded constraint.
  NodeId build_instance_conjunct(const Term& t) {
    if (t.kind == Term::Kind::type && expanded_) {
      lookup(t.text, t.where);
      auto it = expanded_->find(t.text);
      if (it != expanded_->end()) return graph_.add(it->second);
    }
    return build(t);
  }

  void merge(NodeId a, NodeId b, const Path& where, const Location& loc) {
    if (!graph_.unify(a, b, where)) {
      throw GrammarError("constraint", loc.str(), graph_.failure().describe());
    }
  }

  FeatureStructure extract(NodeId root, const Location& loc) {
    auto fs = graph_.extract(root);
    if (!fs) throw GrammarError("constraint", loc.str(), graph_.failure().describe());
    return *fs;
  }

 private:
  TypeId lookup(const std::string& name, const Location& loc) {
    auto t = h_.find(name);
    if (!t) throw GrammarError("reference", loc.str(), "unknown type '" + name + "'");
    return *t;
  }

  const TypeHierarchy& h_;
  const std::map<std::string, FeatureStructure>* expanded_;
  FsGraph graph_;
  std::map<std::string, NodeId> tags_;
};

std::vector<const Term*> conjuncts(const Term& body) {
  std::vector<const Term*> out;
  if (body.kind == Term::Kind::conj) {
    for (const auto& item : body.items) out.push_back(&item);
  } else {
    out.push_back(&body);
  }
  return out;
}

Grammar expand_with_locations(Grammar g, const std::map<std::string, Location>& where) {
  const auto& h = g.hierarchy;
  // Parents before children.
  std::vector<TypeId> order;
  std::vector<char> seen(h.size(), 0);
  auto visit = [&](auto&& self, TypeId t) -> void {
    if (seen[t]) return;
    seen[t] = 1;
    for (TypeId p : h.parents(t)) self(self, p);
    order.push_back(t);
  };
  for (TypeId t = 0; t < h.size(); ++t) visit(visit, t);

  std::map<std::string, FeatureStructure> expanded;
  for (TypeId t : order) {
    const std::string& name = h.name(t);
    if (TypeHierarchy::is_string_literal(name)) continue;
    auto loc_it = where.find(name);
    const std::string loc = loc_it != where.end() ? loc_it->second.str() : std::string();
    FsGraph graph(h);
    NodeId root = graph.add_node(t);
    auto local = g.constraints.find(name);
    if (local != g.constraints.end() && !graph.unify(root, graph.add(local->second))) {
      throw GrammarError("constraint", loc, "type '" + name + "': " + graph.failure().describe());
    }
    for (TypeId p : h.parents(t)) {
      auto pe = expanded.find(h.name(p));
      if (pe == expanded.end()) continue;
      if (!graph.unify(root, graph.add(pe->second))) {
        throw GrammarError("constraint", loc,
                           "type '" + name + "' is inconsistent with '" + h.name(p) + "': " + graph.failure().describe());
      }
    }
    auto fs = graph.extract(root);
    if (!fs) throw GrammarError("constraint", loc, "type '" + name + "': " + graph.failure().describe());
    expanded.emplace(name, std::move(*fs));
  }
  g.expanded = std::move(expanded);
  return g;
}

std::string literal_of(const FeatureStructure& fs, const Path& path, const TypeHierarchy& h) {
  auto t = fs.type_at(path);
  if (!t || !TypeHierarchy::is_string_literal(h.name(*t))) return {};
  return TypeHierarchy::literal_value(h.name(*t));
}

std::string annotation(const Definition& d, const std::string& key, const std::string& fallback = {}) {
  auto it = d.annotations.find(key);
  return it == d.annotations.end() ? fallback : it->second;
}

void check_annotations(const Definition& d, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : d.annotations) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw GrammarError("definition", d.where.str(), "unexpected annotation @" + key + " on '" + d.name + "'");
    }
  }
}

// The single type conjunct naming an instance's type.
std::string instance_type(const Definition& d) {
  std::string found;
  for (const Term* t : conjuncts(d.body)) {
    if (t->kind != Term::Kind::type) continue;
    if (!found.empty()) {
      throw GrammarError("definition", d.where.str(), "'" + d.name + "' names more than one type");
    }
    found = t->text;
  }
  return found;
}

// Unifies every node reachable from `root` with the expanded constraint of
// its type until nothing changes, so nested type references carry their
// full constraints.
void deep_expand(FsGraph& graph, NodeId root, const std::map<std::string, FeatureStructure>& expanded,
                 const Location& where) {
  const auto& h = graph.hierarchy();
  std::set<std::pair<NodeId, TypeId>> applied;
  for (int round = 0;; ++round) {
    if (round > 64) throw GrammarError("constraint", where.str(), "type constraint expansion does not terminate");
    std::vector<NodeId> reachable;
    std::set<NodeId> seen;
    std::vector<NodeId> stack{graph.find(root)};
    while (!stack.empty()) {
      NodeId n = graph.find(stack.back());
      stack.pop_back();
      if (!seen.insert(n).second) continue;
      reachable.push_back(n);
      for (const auto& arc : graph.arcs(n)) stack.push_back(arc.target);
    }
    bool changed = false;
    for (NodeId n : reachable) {
      n = graph.find(n);
      TypeId t = graph.type(n);
      if (t == h.top()) continue;
      auto it = expanded.find(h.name(t));
      if (it == expanded.end()) continue;
      if (it->second.size() == 1) continue;
      if (!applied.insert({n, t}).second) continue;
      if (!graph.unify(n, graph.add(it->second))) {
        throw GrammarError("constraint", where.str(),
                           "expanding '" + h.name(t) + "': " + graph.failure().describe());
      }
      changed = true;
    }
    if (!changed) return;
  }
}

FeatureStructure build_instance(const Definition& d, const TypeHierarchy& h,
                                const std::map<std::string, FeatureStructure>& expanded) {
  Builder b(h, &expanded);
  NodeId root = b.graph().add_node(h.top());
  for (const Term* t : conjuncts(d.body)) {
    NodeId v = b.build_instance_conjunct(*t);
    b.merge(root, v, {}, t->where);
  }
  deep_expand(b.graph(), root, expanded, d.where);
  return b.extract(root, d.where);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError("io", path.string(), "cannot open grammar file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Grammar expand_constraints(Grammar g) { return expand_with_locations(std::move(g), {}); }

Grammar load_grammar(std::string_view source, GrammarMode mode, const std::string& name,
                     const IncludeResolver& resolver) {
  std::string all_sources(source);
  std::vector<Definition> defs;
  int depth = 0;
  tdl::IncludeHandler on_include;
  on_include = [&](const std::string& target, const std::string& section,
                   const Location& where) -> std::vector<Definition> {
    if (!resolver) throw GrammarError("io", where.str(), "no include resolver for '" + target + "'");
    if (++depth > 16) throw GrammarError("io", where.str(), "include nesting too deep");
    std::string text = resolver(where.file, target);
    all_sources += text;
    auto out = tdl::parse(text, target, section, on_include);
    --depth;
    return out;
  };
  try {
    defs = tdl::parse(source, name, "", on_include);
  } catch (const tdl::SyntaxError& e) {
    throw GrammarError("syntax", e.where.str(), e.message);
  }

  // Type hierarchy.
  TypeHierarchy::Builder hb;
  for (const auto& [type, parents] : kBuiltinTypes) hb.add(type, parents);
  std::map<std::string, Location> type_where;
  std::set<std::string> strings;
  for (const auto& d : defs) {
    collect_strings(d.body, strings);
    if (d.section != "types") continue;
    if (type_where.count(d.name)) {
      throw GrammarError("definition", d.where.str(), "type '" + d.name + "' is defined twice");
    }
    type_where.emplace(d.name, d.where);
    std::vector<std::string> parents;
    for (const Term* t : conjuncts(d.body)) {
      if (t->kind == Term::Kind::type) parents.push_back(t->text);
    }
    hb.add(d.name, parents);
  }
  for (const auto& s : strings) hb.add_string(s);

  Grammar g;
  g.mode = mode;
  try {
    g.hierarchy = hb.build();
  } catch (const HierarchyError& e) {
    std::string loc;
    if (!e.types().empty() && type_where.count(e.types().front())) loc = type_where.at(e.types().front()).str();
    throw GrammarError("hierarchy", loc, e.what());
  }
  const TypeHierarchy& h = g.hierarchy;

  // Local constraints.
  for (const auto& d : defs) {
    if (d.section != "types") continue;
    check_annotations(d, {});
    Builder b(h, nullptr);
    NodeId root = b.graph().add_node(h.id(d.name));
    bool any = false;
    for (const Term* t : conjuncts(d.body)) {
      if (t->kind == Term::Kind::type) continue;
      any = true;
      NodeId v = b.build(*t);
      b.merge(root, v, {}, t->where);
    }
    if (any) g.constraints.emplace(d.name, b.extract(root, d.where));
  }
  g = expand_with_locations(std::move(g), type_where);

  std::set<std::string> instance_names;
  auto claim_name = [&](const Definition& d) {
    if (!instance_names.insert(d.name).second) {
      throw GrammarError("definition", d.where.str(), "'" + d.name + "' is defined twice");
    }
  };

  for (const auto& d : defs) {
    if (d.section == "types") continue;
    if (d.section == "lexicon") {
      claim_name(d);
      check_annotations(d, {"lemma", "tag", "paradigm"});
      LexicalEntry e;
      e.id = d.name;
      e.lex_type = instance_type(d);
      if (e.lex_type.empty()) throw GrammarError("definition", d.where.str(), "entry '" + d.name + "' has no type");
      e.fs = build_instance(d, h, g.expanded);
      e.surface = literal_of(e.fs, {"STEM"}, h);
      if (e.surface.empty()) {
        throw GrammarError("definition", d.where.str(), "entry '" + d.name + "' has no STEM string");
      }
      e.predicate = literal_of(e.fs, {"KEYREL", "PRED"}, h);
      e.lemma = annotation(d, "lemma", e.surface);
      e.tag = annotation(d, "tag");
      if (e.tag.empty()) throw GrammarError("definition", d.where.str(), "entry '" + d.name + "' has no @tag");
      e.paradigm_key = annotation(d, "paradigm", e.lemma);
      g.lexicon[e.surface].push_back(std::move(e));
    } else if (d.section == "lexrules") {
      claim_name(d);
      check_annotations(d, {"tag", "learner", "feedback"});
      LexicalRule r;
      r.id = d.name;
      r.trigger_tag = annotation(d, "tag");
      r.learner = d.annotations.count("learner") != 0;
      if (d.annotations.count("feedback")) r.feedback_key = annotation(d, "feedback");
      FeatureStructure fs = build_instance(d, h, g.expanded);
      auto in = fs.at({"INPUT"});
      auto out = fs.at({"OUTPUT"});
      r.input_schema = in ? fs.sub(*in) : FeatureStructure(h.top());
      r.output_schema = out ? fs.sub(*out) : FeatureStructure(h.top());
      FsGraph graph(h);
      NodeId root = graph.add(fs);
      NodeId gin = graph.ensure_path(root, {"INPUT"});
      NodeId gout = graph.ensure_path(root, {"OUTPUT"});
      if (!graph.unify(gin, gout)) {
        throw GrammarError("constraint", d.where.str(),
                           "lexical rule '" + d.name + "' INPUT/OUTPUT clash: " + graph.failure().describe());
      }
      auto body = graph.extract(gin);
      if (!body) throw GrammarError("constraint", d.where.str(), graph.failure().describe());
      r.body = std::move(*body);
      if (r.learner) {
        auto learner = r.output_schema.type_at({"LEARNER"});
        if (!learner || h.name(*learner) != "+") {
          throw GrammarError("definition", d.where.str(),
                             "learner rule '" + d.name + "' must constrain OUTPUT.LEARNER to +");
        }
      }
      if (mode == GrammarMode::learner || !r.learner) g.lexical_rules.push_back(std::move(r));
    } else if (d.section == "rules") {
      claim_name(d);
      check_annotations(d, {"head", "learner", "feedback"});
      PhrasalRule r;
      r.id = d.name;
      r.learner = d.annotations.count("learner") != 0;
      if (d.annotations.count("feedback")) r.feedback_key = annotation(d, "feedback");
      r.fs = build_instance(d, h, g.expanded);
      auto args = r.fs.at({"ARGS"});
      if (!args) throw GrammarError("definition", d.where.str(), "rule '" + d.name + "' has no ARGS list");
      FsGraph graph(h);
      NodeId root = graph.add(r.fs);
      std::vector<NodeId> elements;
      try {
        elements = graph.list_elements(*graph.at(root, {"ARGS"}));
      } catch (const InputError& e) {
        throw GrammarError("definition", d.where.str(), "rule '" + d.name + "': ARGS " + e.what());
      }
      if (elements.empty() || elements.size() > 2) {
        throw GrammarError("definition", d.where.str(), "rule '" + d.name + "' must have one or two daughters");
      }
      r.arity = elements.size();
      const std::string args_feature = "ARGS";
      r.mother_schema = r.fs.without(std::span(&args_feature, 1));
      Path p{"ARGS"};
      for (std::size_t i = 0; i < r.arity; ++i) {
        auto dtr = r.fs.at(p);
        r.daughter_schemas.push_back(r.fs.sub(*r.fs.follow(*dtr, "FIRST")));
        p.push_back("REST");
      }
      const std::string head = annotation(d, "head", "0");
      if (head != "0" && head != "1") {
        throw GrammarError("definition", d.where.str(), "rule '" + d.name + "': @head must be 0 or 1");
      }
      r.head_index = head == "1" ? 1 : 0;
      if (r.head_index >= r.arity) {
        throw GrammarError("definition", d.where.str(), "rule '" + d.name + "': @head out of range");
      }
      if (mode == GrammarMode::learner || !r.learner) g.phrasal_rules.push_back(std::move(r));
    } else if (d.section == "root") {
      check_annotations(d, {});
      g.root = build_instance(d, h, g.expanded);
    } else if (d.section == "feedback") {
      check_annotations(d, {"category", "severity", "message"});
      FeedbackTemplate t;
      t.name = d.name;
      t.category = annotation(d, "category");
      t.message = annotation(d, "message");
      const std::string severity = annotation(d, "severity", "error");
      if (severity != "error" && severity != "advisory") {
        throw GrammarError("definition", d.where.str(), "severity must be error or advisory");
      }
      t.severity = severity == "error" ? Severity::error : Severity::advisory;
      if (t.category.empty() || t.message.empty()) {
        throw GrammarError("definition", d.where.str(), "feedback '" + d.name + "' needs @category and @message");
      }
      static const std::regex placeholder(R"(\{([^}]*)\})");
      for (std::sregex_iterator it(t.message.begin(), t.message.end(), placeholder), end; it != end; ++it) {
        const std::string key = (*it)[1];
        if (key != "surface" && key != "expected" && key != "head") {
          throw GrammarError("definition", d.where.str(), "unknown placeholder {" + key + "}");
        }
      }
      g.feedback_templates.emplace(t.name, std::move(t));
    } else {
      throw GrammarError("definition", d.where.str(), "unknown section '" + d.section + "'");
    }
  }

  auto check_feedback = [&](const std::optional<std::string>& key, const std::string& rule) {
    if (key && !g.feedback_templates.count(*key)) {
      throw GrammarError("reference", name, "rule '" + rule + "' names unknown feedback template '" + *key + "'");
    }
  };
  for (const auto& r : g.lexical_rules) check_feedback(r.feedback_key, r.id);
  for (const auto& r : g.phrasal_rules) check_feedback(r.feedback_key, r.id);

  std::string stem = std::filesystem::path(name).stem().string();
  g.version_label = stem + "/" + std::string(to_string(mode)) + "/" + hash_hex(all_sources).substr(0, 12);
  return g;
}

Grammar load_grammar_file(const std::filesystem::path& path, GrammarMode mode) {
  const std::string text = read_file(path);
  const auto base = path.parent_path();
  IncludeResolver resolver = [base](const std::string&, const std::string& target) {
    return read_file(base / target);
  };
  return load_grammar(text, mode, path.filename().string(), resolver);
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

class AvmWriter {
 public:
  AvmWriter(const FeatureStructure& fs, const TypeHierarchy& h) : fs_(fs), h_(h), indegree_(fs.size(), 0) {
    for (const auto& n : fs.nodes()) {
      for (const auto& a : n.arcs) ++indegree_[a.target];
    }
    tags_.assign(fs.size(), 0);
  }

  // Root arcs as an AVM; the root type is written separately.
  std::string root_avm() {
    return avm(0);
  }

 private:
  std::string type_text(TypeId t) {
    const auto& name = h_.name(t);
    if (TypeHierarchy::is_string_literal(name)) return quote(TypeHierarchy::literal_value(name));
    return name;
  }

  std::string avm(NodeId n) {
    const auto& arcs = fs_.node(n).arcs;
    if (arcs.empty()) return {};
    std::string out = "[ ";
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (i) out += ", ";
      out += arcs[i].feature + " " + value(arcs[i].target);
    }
    return out + " ]";
  }

  std::string value(NodeId n) {
    std::vector<std::string> parts;
    if (indegree_[n] > 1) {
      if (tags_[n]) return "#t" + std::to_string(tags_[n]);
      tags_[n] = ++next_;
      parts.push_back("#t" + std::to_string(tags_[n]));
    }
    if (fs_.type(n) != h_.top() || parts.empty()) parts.push_back(type_text(fs_.type(n)));
    std::string body = avm(n);
    if (!body.empty()) parts.push_back(body);
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " & " : "") + parts[i];
    return out;
  }

  const FeatureStructure& fs_;
  const TypeHierarchy& h_;
  std::vector<int> indegree_;
  std::vector<int> tags_;
  int next_ = 0;
};

std::string instance_text(const std::string& id, const FeatureStructure& fs, const TypeHierarchy& h) {
  std::string out = id + " := " + h.name(fs.type());
  std::string body = AvmWriter(fs, h).root_avm();
  if (!body.empty()) out += " & " + body;
  return out;
}

}  // namespace

std::string write_grammar(const Grammar& g) {
  const auto& h = g.hierarchy;
  std::ostringstream out;
  out << "%types\n";
  for (TypeId t = 1; t < h.size(); ++t) {
    const auto& name = h.name(t);
    if (TypeHierarchy::is_string_literal(name)) continue;
    bool builtin = std::any_of(kBuiltinTypes.begin(), kBuiltinTypes.end(),
                               [&](const auto& b) { return b.first == name; });
    if (builtin) continue;
    out << name << " :=";
    const auto parents = h.parents(t);
    for (std::size_t i = 0; i < parents.size(); ++i) out << (i ? " & " : " ") << h.name(parents[i]);
    auto it = g.expanded.find(name);
    if (it != g.expanded.end()) {
      std::string body = AvmWriter(it->second, h).root_avm();
      if (!body.empty()) out << " & " << body;
    }
    out << ".\n";
  }
  out << "\n%lexicon\n";
  for (const auto& [surface, entries] : g.lexicon) {
    for (const auto& e : entries) {
      out << instance_text(e.id, e.fs, h);
      if (e.lex_type != h.name(e.fs.type())) out << " & " << e.lex_type;
      out << " @lemma " << quote(e.lemma) << " @tag " << quote(e.tag) << " @paradigm " << quote(e.paradigm_key)
          << ".\n";
    }
  }
  out << "\n%lexrules\n";
  for (const auto& r : g.lexical_rules) {
    FsGraph graph(h);
    NodeId root = graph.add_node(h.top());
    graph.set_arc(root, "INPUT", graph.add(r.input_schema));
    graph.set_arc(root, "OUTPUT", graph.add(r.output_schema));
    // Rules are written with separate INPUT/OUTPUT; `body` is recomputed on load.
    out << instance_text(r.id, *graph.extract(root), h);
    if (!r.trigger_tag.empty()) out << " @tag " << quote(r.trigger_tag);
    if (r.learner) out << " @learner";
    if (r.feedback_key) out << " @feedback " << quote(*r.feedback_key);
    out << ".\n";
  }
  out << "\n%rules\n";
  for (const auto& r : g.phrasal_rules) {
    out << instance_text(r.id, r.fs, h) << " @head " << r.head_index;
    if (r.learner) out << " @learner";
    if (r.feedback_key) out << " @feedback " << quote(*r.feedback_key);
    out << ".\n";
  }
  out << "\n%root\n" << instance_text("root", g.root, h) << ".\n";
  out << "\n%feedback\n";
  for (const auto& [name, t] : g.feedback_templates) {
    out << name << " := @category " << quote(t.category) << " @severity " << to_string(t.severity) << " @message "
        << quote(t.message) << ".\n";
  }
  return out.str();
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("COACH_DATA_DIR"); env && *env) return env;
  return COACH_DATA_DIR;
}

std::filesystem::path resolve_grammar_path(const std::string& name_or_path) {
  if (name_or_path == "toy" || name_or_path == "toy-underconstrained") {
    return data_dir() / "grammar" / (name_or_path + ".tdl");
  }
  return name_or_path;
}

}  // namespace coach
