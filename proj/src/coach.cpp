#include "coach/coach.hpp"

#include <algorithm>
#include <tuple>

#include "coach/errors.hpp"

namespace coach {

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::grammatical: return "grammatical";
    case VerdictKind::learner: return "learner";
    case VerdictKind::no_parse: return "no_parse";
  }
  return "no_parse";
}

const Reading* select_reading(const ParseResult& result) {
  if (result.readings.empty()) return nullptr;
  return &*std::min_element(result.readings.begin(), result.readings.end(), reading_less);
}

namespace {

void collect_learner(const DerivationNode& n, std::vector<LearnerUse>& out) {
  if (n.learner && n.kind != DerivationNode::Kind::lexeme) out.push_back({n.label, n.start, n.end});
  for (const auto& c : n.children) collect_learner(c, out);
}

const DerivationNode* lexical_head(const DerivationNode* n) {
  while (n->kind != DerivationNode::Kind::lexeme) {
    std::size_t i = n->kind == DerivationNode::Kind::phrasal ? n->head_index : 0;
    n = &n->children.at(std::min(i, n->children.size() - 1));
  }
  return n;
}

// The sister of the lowest binary node dominating [start, end).
const DerivationNode* sister_of(const DerivationNode& root, std::size_t start, std::size_t end) {
  const DerivationNode* sister = nullptr;
  const DerivationNode* n = &root;
  while (true) {
    const DerivationNode* next = nullptr;
    for (const auto& c : n->children) {
      if (c.start <= start && end <= c.end && !(c.start == n->start && c.end == n->end && n->children.size() > 1)) {
        next = &c;
        break;
      }
    }
    if (!next) break;
    if (n->children.size() == 2) sister = (next == &n->children[0]) ? &n->children[1] : &n->children[0];
    if (next->start == start && next->end == end && next->kind == DerivationNode::Kind::lexeme) break;
    n = next;
  }
  return sister;
}

// Byte offset of code point `cp` in `s`.
std::size_t byte_offset(std::string_view s, std::size_t cp) {
  std::size_t i = 0;
  for (std::size_t k = 0; k < cp && i < s.size(); ++k) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    i += c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
  }
  return std::min(i, s.size());
}

std::string span_text(const std::vector<Token>& tokens, std::size_t start, std::size_t end) {
  std::string out;
  for (std::size_t i = start; i < end && i < tokens.size(); ++i) {
    if (i > start) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

std::optional<std::string> replacement_for(const LexicalEntry& entry, const Predication& target, const Grammar& strict) {
  const auto& h = strict.hierarchy;
  if (!target.gender || !target.pernum) return std::nullopt;
  auto want_pernum = h.find(*target.pernum);
  if (!want_pernum) return std::nullopt;
  for (const auto& [surface, entries] : strict.lexicon) {
    for (const auto& e : entries) {
      if (e.paradigm_key != entry.paradigm_key || e.lex_type != entry.lex_type || e.surface == entry.surface) continue;
      for (const auto& edge : token_edges(e.surface, strict)) {
        if (edge.learner || edge.entry->id != e.id) continue;
        auto gen = edge.fs.type_at({"PNG", "GEN"});
        auto pernum = edge.fs.type_at({"PNG", "PERNUM"});
        if (!gen || !pernum || h.name(*gen) != *target.gender) continue;
        if (!h.glb(*pernum, *want_pernum)) continue;
        return e.surface;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<LearnerUse> detect_learner(const Reading& reading, const Grammar& g) {
  std::vector<LearnerUse> out;
  collect_learner(reading.derivation, out);
  std::sort(out.begin(), out.end(), [](const LearnerUse& a, const LearnerUse& b) {
    return std::tie(a.start, a.end, a.rule) < std::tie(b.start, b.end, b.rule);
  });
  std::set<LearnerUse> recorded(out.begin(), out.end());
  if (recorded != reading.learner_uses) {
    throw InternalError("learner_uses of the reading disagree with its derivation");
  }
  auto flag = reading.fs.type_at({"LEARNER"});
  const bool plus = flag && g.hierarchy.name(*flag) == "+";
  if (plus != !out.empty()) {
    throw InternalError("root LEARNER value disagrees with the learner rules in the derivation");
  }
  return out;
}

Correction suggest_correction(const Reading& reading, const std::string& sentence, const std::vector<Token>& tokens,
                              const Grammar& g_learner, const Parser& strict, const ParseOptions& opts) {
  auto uses = detect_learner(reading, g_learner);
  if (uses.empty()) throw PreconditionError("suggest_correction needs a reading with learner uses");
  Correction c;
  auto leaves = derivation_leaves(reading.derivation);
  const bool aligned = reading.semantics.rels.size() == leaves.size();
  std::vector<std::pair<std::size_t, std::string>> edits;  // token index -> form
  for (const auto& use : uses) {
    std::string expected;
    if (!g_learner.lexical_rule(use.rule)) {
      c.diagnostics.push_back("no correction is defined for the phrasal learner rule '" + use.rule + "'");
    } else if (!aligned) {
      c.diagnostics.push_back("semantics do not align with the leaves; cannot read the agreement target");
    } else {
      const DerivationNode* leaf = leaves.at(use.start);
      const LexicalEntry* entry = g_learner.entry(leaf->label);
      const Predication& target = reading.semantics.rels.at(use.start);
      auto found = entry ? replacement_for(*entry, target, strict.grammar()) : std::nullopt;
      if (found) {
        expected = *found;
        edits.emplace_back(use.start, expected);
      } else {
        c.diagnostics.push_back("paradigm '" + (entry ? entry->paradigm_key : leaf->label) + "' has no form with " +
                                "gender " + target.gender.value_or("?") + " and number " +
                                target.pernum.value_or("?"));
      }
    }
    c.expected.push_back(expected);
  }
  if (edits.size() != uses.size()) return c;
  std::sort(edits.begin(), edits.end());
  std::string text = sentence;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    const Token& t = tokens.at(it->first);
    const std::size_t b = byte_offset(text, t.start);
    const std::size_t e = byte_offset(text, t.end);
    text.replace(b, e - b, it->second);
  }
  auto check = strict.parse(text, opts);
  if (check.readings.empty()) {
    c.diagnostics.push_back("the corrected sentence \"" + text + "\" is not accepted by the strict grammar");
    return c;
  }
  c.text = text;
  return c;
}

Coach::Coach(std::shared_ptr<const Grammar> strict, std::shared_ptr<const Grammar> learner)
    : strict_(std::move(strict)),
      learner_(std::move(learner)),
      strict_parser_(*strict_),
      learner_parser_(*learner_) {
  if (strict_->mode != GrammarMode::strict || learner_->mode != GrammarMode::learner) {
    throw PreconditionError("Coach needs a strict and a learner grammar");
  }
}

Coach Coach::from_file(const std::string& grammar_name_or_path) {
  auto path = resolve_grammar_path(grammar_name_or_path);
  return Coach(std::make_shared<const Grammar>(load_grammar_file(path, GrammarMode::strict)),
               std::make_shared<const Grammar>(load_grammar_file(path, GrammarMode::learner)));
}

Verdict Coach::check(const std::string& sentence, const ParseOptions& opts) const {
  Verdict v;
  v.sentence = sentence;
  v.tokens = tokenize(sentence, *strict_);
  if (v.tokens.empty()) throw InputError("the sentence contains no words");
  ParseResult strict = strict_parser_.parse(v.tokens, opts);
  v.strict_stats = strict.stats;
  if (const Reading* r = select_reading(strict)) {
    v.kind = VerdictKind::grammatical;
    v.reading = *r;
    return v;
  }
  ParseResult learner = learner_parser_.parse(v.tokens, opts);
  v.learner_stats = learner.stats;
  const Reading* r = select_reading(learner);
  if (!r) {
    v.kind = VerdictKind::no_parse;
    return v;
  }
  v.reading = *r;
  auto uses = detect_learner(*r, *learner_);
  if (uses.empty()) {
    v.kind = VerdictKind::grammatical;
    return v;
  }
  v.kind = VerdictKind::learner;
  Correction c = suggest_correction(*r, sentence, v.tokens, *learner_, strict_parser_, opts);
  v.corrected = c.text;
  v.diagnostics = c.diagnostics;
  for (std::size_t i = 0; i < uses.size(); ++i) {
    const auto& use = uses[i];
    FeedbackItem item;
    item.rule = use.rule;
    item.token_start = use.start;
    item.token_end = use.end;
    item.char_start = v.tokens.at(use.start).start;
    item.char_end = v.tokens.at(use.end - 1).end;
    item.surface = span_text(v.tokens, use.start, use.end);
    item.expected = c.expected[i];
    std::string head;
    if (const DerivationNode* sister = sister_of(r->derivation, use.start, use.end)) {
      head = v.tokens.at(lexical_head(sister)->start).text;
    }
    std::optional<std::string> key;
    if (const LexicalRule* lr = learner_->lexical_rule(use.rule)) key = lr->feedback_key;
    if (const PhrasalRule* pr = learner_->phrasal_rule(use.rule)) key = pr->feedback_key;
    auto tmpl = key ? learner_->feedback_templates.find(*key) : learner_->feedback_templates.end();
    if (tmpl != learner_->feedback_templates.end()) {
      item.category = tmpl->second.category;
      item.severity = tmpl->second.severity;
      item.message = tmpl->second.render(
          {{"surface", item.surface}, {"expected", item.expected.empty() ? "?" : item.expected}, {"head", head}});
    } else {
      item.category = "learner";
      item.message = "\"" + item.surface + "\" is analysed with the learner rule " + use.rule + ".";
    }
    v.feedback.push_back(std::move(item));
  }
  return v;
}

Verdict coach_sentence(const std::string& sentence, const Grammar& g_learner, const Grammar& g_strict,
                       const ParseOptions& opts) {
  Coach c(std::shared_ptr<const Grammar>(&g_strict, [](const Grammar*) {}),
          std::shared_ptr<const Grammar>(&g_learner, [](const Grammar*) {}));
  return c.check(sentence, opts);
}

std::string format_verdict(const Verdict& v) {
  std::string out = "verdict: " + std::string(to_string(v.kind)) + "\n";
  for (const auto& f : v.feedback) {
    out += "[" + f.category + "] " + std::to_string(f.token_start) + "-" + std::to_string(f.token_end) + " \"" +
           f.surface + "\" → \"" + f.expected + "\": " + f.message + "\n";
  }
  if (v.corrected) out += "corrected: " + *v.corrected + "\n";
  for (const auto& d : v.diagnostics) out += "note: " + d + "\n";
  return out;
}

}  // namespace coach
