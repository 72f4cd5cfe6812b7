#include "coach/parser.hpp"

#include <algorithm>
#include <chrono>

#include "coach/errors.hpp"

namespace coach {

namespace {

const std::vector<std::string> kComputedFeatures = {"LEARNER", "RELS"};

FeatureStructure strip_computed(const FeatureStructure& fs) { return fs.without(kComputedFeatures); }

bool has_learner_plus(const FeatureStructure& fs, const TypeHierarchy& h) {
  auto t = fs.type_at({"LEARNER"});
  return t && h.name(*t) == "+";
}

DerivationNode lexical_derivation(const Edge& e, const Grammar& g, const std::vector<Token>& tokens) {
  DerivationNode leaf;
  leaf.kind = DerivationNode::Kind::lexeme;
  leaf.label = e.rule;
  leaf.start = e.start;
  leaf.end = e.end;
  const LexicalEntry* entry = g.entry(e.rule);
  leaf.surface = entry ? entry->surface : tokens[e.start].form;
  DerivationNode node = std::move(leaf);
  for (const auto& r : e.lex_rules) {
    DerivationNode up;
    up.kind = DerivationNode::Kind::lexrule;
    up.label = r;
    up.start = e.start;
    up.end = e.end;
    const LexicalRule* rule = g.lexical_rule(r);
    up.learner = rule && rule->learner;
    up.children.push_back(std::move(node));
    node = std::move(up);
  }
  return node;
}

DerivationNode derivation_of(const std::vector<Edge>& chart, std::size_t index, const Grammar& g,
                             const std::vector<Token>& tokens) {
  const Edge& e = chart[index];
  if (e.lexical) return lexical_derivation(e, g, tokens);
  DerivationNode n;
  n.kind = DerivationNode::Kind::phrasal;
  n.label = e.rule;
  n.start = e.start;
  n.end = e.end;
  const PhrasalRule* rule = g.phrasal_rule(e.rule);
  n.learner = rule && rule->learner;
  n.head_index = rule ? rule->head_index : 0;
  for (std::size_t c : e.children) n.children.push_back(derivation_of(chart, c, g, tokens));
  return n;
}

}  // namespace

bool reading_less(const Reading& a, const Reading& b) {
  if (a.learner_uses.size() != b.learner_uses.size()) return a.learner_uses.size() < b.learner_uses.size();
  if (a.node_count != b.node_count) return a.node_count < b.node_count;
  return a.derivation_string < b.derivation_string;
}

RuleFilter RuleFilter::build(const Grammar& g) {
  RuleFilter f;
  f.enabled_ = true;
  const auto& h = g.hierarchy;
  std::vector<std::pair<std::string, FeatureStructure>> candidates;
  std::set<std::string> lex_types;
  for (const auto& [surface, entries] : g.lexicon) {
    for (const auto& e : entries) lex_types.insert(e.lex_type);
  }
  for (const auto& t : lex_types) {
    auto it = g.expanded.find(t);
    candidates.emplace_back("lex:" + t, strip_computed(it != g.expanded.end() ? it->second : FeatureStructure(h.id(t))));
  }
  for (const auto& r : g.phrasal_rules) candidates.emplace_back("rule:" + r.id, strip_computed(r.mother_schema));
  for (std::size_t ri = 0; ri < g.phrasal_rules.size(); ++ri) {
    const auto& rule = g.phrasal_rules[ri];
    for (std::size_t d = 0; d < rule.arity; ++d) {
      const FeatureStructure schema = strip_computed(rule.daughter_schemas[d]);
      for (const auto& [key, fs] : candidates) {
        f.table_[{ri, d, key}] = static_cast<bool>(unify(fs, schema, h));
      }
    }
  }
  return f;
}

bool RuleFilter::allows(std::size_t rule, std::size_t daughter, const std::string& candidate) const {
  if (!enabled_) return true;
  auto it = table_.find({rule, daughter, candidate});
  return it == table_.end() || it->second;
}

std::size_t RuleFilter::blocked() const {
  return static_cast<std::size_t>(std::count_if(table_.begin(), table_.end(), [](const auto& kv) { return !kv.second; }));
}

std::optional<FeatureStructure> build_mother(const PhrasalRule& rule, std::span<const FeatureStructure* const> daughters,
                                             const Grammar& g, UnifyFailure* failure) {
  if (daughters.size() != rule.arity) throw PreconditionError("rule '" + rule.id + "' expects " +
                                                              std::to_string(rule.arity) + " daughters");
  const auto& h = g.hierarchy;
  FsGraph graph(h);
  const NodeId root = graph.add(rule.fs);
  auto cell = graph.at(root, {"ARGS"});
  if (!cell) throw InternalError("rule '" + rule.id + "' has no ARGS");
  Path where{"ARGS"};
  std::vector<NodeId> slots;
  bool learner = rule.learner;
  for (const FeatureStructure* d : daughters) {
    auto first = graph.follow(*cell, "FIRST");
    auto rest = graph.follow(*cell, "REST");
    if (!first || !rest) throw InternalError("rule '" + rule.id + "' has a malformed ARGS list");
    Path slot_path = where;
    slot_path.push_back("FIRST");
    const NodeId dn = graph.add(*d);
    if (!graph.unify(*first, dn, slot_path)) {
      if (failure) *failure = graph.failure();
      return std::nullopt;
    }
    slots.push_back(*first);
    learner = learner || has_learner_plus(*d, h);
    cell = rest;
    where.push_back("REST");
  }
  std::vector<NodeId> rels;
  for (NodeId s : slots) {
    auto r = graph.at(s, {"RELS"});
    if (!r) throw InternalError("daughter of '" + rule.id + "' has no RELS");
    rels.push_back(*r);
  }
  NodeId all = rels.back();
  for (std::size_t i = rels.size() - 1; i-- > 0;) all = graph.list_append(rels[i], all);
  graph.remove_arc(root, "ARGS");
  graph.set_arc(root, "RELS", all);
  auto flag = h.find(learner ? "+" : "-");
  if (!flag) throw InputError("grammar does not declare the LEARNER values + and -");
  graph.set_arc(root, "LEARNER", graph.add_node(*flag));
  auto out = graph.extract(root);
  if (!out && failure) *failure = graph.failure();
  return out;
}

std::optional<Edge> apply_rule(const PhrasalRule& rule, std::span<const Edge* const> daughters, const Grammar& g,
                               UnifyFailure* failure) {
  if (daughters.size() != rule.arity) {
    throw PreconditionError("rule '" + rule.id + "' expects " + std::to_string(rule.arity) + " daughters");
  }
  for (std::size_t i = 1; i < daughters.size(); ++i) {
    if (daughters[i - 1]->end != daughters[i]->start) {
      throw PreconditionError("daughters of '" + rule.id + "' are not adjacent");
    }
  }
  std::vector<const FeatureStructure*> fss;
  for (const Edge* d : daughters) fss.push_back(&d->fs);
  auto mother = build_mother(rule, fss, g, failure);
  if (!mother) return std::nullopt;
  Edge e;
  e.start = daughters.front()->start;
  e.end = daughters.back()->end;
  e.fs = std::move(*mother);
  e.rule = rule.id;
  e.filter_key = "rule:" + rule.id;
  for (const Edge* d : daughters) e.learner_uses.insert(d->learner_uses.begin(), d->learner_uses.end());
  if (rule.learner) e.learner_uses.insert({rule.id, e.start, e.end});
  return e;
}

std::vector<std::vector<LexicalEdge>> sentence_lexical_edges(const std::vector<Token>& tokens, const Grammar& g,
                                                             std::size_t max_chain) {
  std::vector<std::vector<LexicalEdge>> out;
  for (const auto& t : tokens) out.push_back(token_edges(t.form, g, max_chain));
  return out;
}

Parser::Parser(const Grammar& g) : g_(&g), filter_(RuleFilter::build(g)) {}

ParseResult Parser::parse(const std::string& sentence, const ParseOptions& opts) const {
  auto tokens = tokenize(sentence, *g_);
  ParseResult r = parse(tokens, opts);
  r.sentence = sentence;
  return r;
}

ParseResult Parser::parse(const std::vector<Token>& tokens, const ParseOptions& opts) const {
  const auto started = std::chrono::steady_clock::now();
  const Grammar& g = *g_;
  const auto& h = g.hierarchy;
  if (tokens.empty()) throw InputError("cannot parse an empty token sequence");
  if (tokens.size() > opts.max_len) {
    throw InputError("sentence has " + std::to_string(tokens.size()) + " tokens; the limit is " +
                     std::to_string(opts.max_len));
  }
  ParseResult result;
  result.tokens = tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) result.sentence += ' ';
    result.sentence += tokens[i].text;
  }
  ParseStats& stats = result.stats;
  const std::size_t n = tokens.size();

  auto lexical = sentence_lexical_edges(tokens, g, opts.max_chain);
  if (opts.supertag_k > 0 && (opts.supertag_ranking || opts.supertag_model)) {
    std::vector<TokenRanking> computed;
    const std::vector<TokenRanking>* ranking = opts.supertag_ranking;
    if (!ranking) {
      std::vector<std::string> forms;
      std::vector<std::vector<std::string>> licensed;
      for (std::size_t i = 0; i < n; ++i) {
        forms.push_back(tokens[i].form);
        std::vector<std::string> sigs;
        for (const auto& e : lexical[i]) sigs.push_back(e.signature());
        licensed.push_back(std::move(sigs));
      }
      computed = predict(forms, licensed, *opts.supertag_model);
      ranking = &computed;
    }
    std::size_t before = 0;
    for (const auto& t : lexical) before += t.size();
    lexical = filter_edges(lexical, *ranking, opts.supertag_k);
    std::size_t after = 0;
    for (const auto& t : lexical) after += t.size();
    stats.filter_prunes_supertag = before - after;
  }

  std::vector<Edge> chart;
  std::vector<std::vector<std::vector<std::size_t>>> cells(n + 1, std::vector<std::vector<std::size_t>>(n + 1));
  auto add_edge = [&](Edge e) {
    chart.push_back(std::move(e));
    const Edge& added = chart.back();
    cells[added.start][added.end].push_back(chart.size() - 1);
    ++stats.edges_built;
    return chart.size() - 1;
  };

  std::vector<std::size_t> unary_rules;
  std::vector<std::size_t> binary_rules;
  for (std::size_t i = 0; i < g.phrasal_rules.size(); ++i) {
    (g.phrasal_rules[i].arity == 1 ? unary_rules : binary_rules).push_back(i);
  }
  auto allows = [&](std::size_t rule, std::size_t d, const Edge& e) {
    if (!opts.rule_filter) return true;
    if (filter_.allows(rule, d, e.filter_key)) return true;
    ++stats.filter_prunes_rule;
    return false;
  };
  auto unary_closure = [&](std::vector<std::size_t> agenda) {
    while (!agenda.empty()) {
      std::size_t idx = agenda.front();
      agenda.erase(agenda.begin());
      if (chart[idx].unary_depth >= opts.max_chain) continue;
      for (std::size_t ri : unary_rules) {
        const Edge* d = &chart[idx];
        if (!allows(ri, 0, *d)) continue;
        ++stats.unification_attempts;
        auto e = apply_rule(g.phrasal_rules[ri], std::span<const Edge* const>(&d, 1), g);
        if (!e) {
          ++stats.unification_failures;
          continue;
        }
        e->children = {idx};
        e->unary_depth = chart[idx].unary_depth + 1;
        agenda.push_back(add_edge(std::move(*e)));
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (lexical[i].empty()) stats.gaps.push_back(i);
  }
  if (!stats.gaps.empty()) {
    for (const auto& t : lexical) stats.edges_built += t.size();
    stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return result;
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> added;
    for (auto& le : lexical[i]) {
      Edge e;
      e.start = i;
      e.end = i + 1;
      e.fs = std::move(le.fs);
      e.rule = le.entry->id;
      e.lexical = true;
      e.lex_rules = le.rules;
      e.signature = le.signature();
      e.filter_key = "lex:" + le.entry->lex_type;
      for (const auto& r : le.rules) {
        const LexicalRule* rule = g.lexical_rule(r);
        if (rule && rule->learner) e.learner_uses.insert({r, i, i + 1});
      }
      added.push_back(add_edge(std::move(e)));
    }
    unary_closure(added);
  }

  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t start = 0; start + len <= n; ++start) {
      const std::size_t end = start + len;
      std::vector<std::size_t> added;
      for (std::size_t mid = start + 1; mid < end; ++mid) {
        const std::vector<std::size_t> left = cells[start][mid];
        const std::vector<std::size_t> right = cells[mid][end];
        for (std::size_t li : left) {
          for (std::size_t rj : right) {
            for (std::size_t ri : binary_rules) {
              if (!allows(ri, 0, chart[li]) || !allows(ri, 1, chart[rj])) continue;
              ++stats.unification_attempts;
              const Edge* ds[2] = {&chart[li], &chart[rj]};
              auto e = apply_rule(g.phrasal_rules[ri], ds, g);
              if (!e) {
                ++stats.unification_failures;
                continue;
              }
              e->children = {li, rj};
              added.push_back(add_edge(std::move(*e)));
            }
          }
        }
      }
      unary_closure(added);
    }
  }

  for (std::size_t idx : cells[0][n]) {
    ++stats.unification_attempts;
    auto rooted = unify(chart[idx].fs, g.root, h);
    if (!rooted) {
      ++stats.unification_failures;
      continue;
    }
    Reading r;
    r.fs = std::move(*rooted.fs);
    r.derivation = derivation_of(chart, idx, g, tokens);
    r.derivation_string = r.derivation.canonical();
    r.node_count = r.derivation.node_count();
    r.learner_uses = chart[idx].learner_uses;
    result.readings.push_back(std::move(r));
  }
  std::sort(result.readings.begin(), result.readings.end(), reading_less);
  stats.readings_found = result.readings.size();
  if (result.readings.size() > opts.reading_cap) result.readings.resize(opts.reading_cap);
  for (auto& r : result.readings) r.semantics = extract_mrs(r.fs, h);
  stats.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

ParseResult parse(const std::vector<std::string>& forms, const Grammar& g, const ParseOptions& opts) {
  std::vector<Token> tokens;
  std::size_t at = 0;
  for (const auto& f : forms) {
    Token t;
    t.text = f;
    t.form = f;
    t.start = at;
    t.end = at + codepoint_count(f);
    at = t.end + 1;
    tokens.push_back(std::move(t));
  }
  Parser p(g);
  return p.parse(tokens, opts);
}

}  // namespace coach
