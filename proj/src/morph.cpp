#include "coach/morph.hpp"

#include <regex>

#include "coach/errors.hpp"
#include "coach/unify.hpp"

namespace coach {

namespace {

// Byte length of the UTF-8 sequence introduced by `lead`.
std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

const std::vector<std::string> kLeading = {"¿", "¡", "\"", "'", "(", "«", "“"};
const std::vector<std::string> kTrailing = {".", ",", ";", ":", "!", "?", "\"", "'", ")", "»", "”"};

bool strip_prefix(std::string& s, const std::vector<std::string>& marks) {
  for (const auto& m : marks) {
    if (s.size() >= m.size() && s.compare(0, m.size(), m) == 0) {
      s.erase(0, m.size());
      return true;
    }
  }
  return false;
}

bool strip_suffix(std::string& s, const std::vector<std::string>& marks) {
  for (const auto& m : marks) {
    if (s.size() >= m.size() && s.compare(s.size() - m.size(), m.size(), m) == 0) {
      s.erase(s.size() - m.size());
      return true;
    }
  }
  return false;
}

}  // namespace

std::size_t codepoint_count(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); i += utf8_length(static_cast<unsigned char>(text[i]))) ++n;
  return n;
}

std::string to_lower(std::string_view text) {
  static const std::vector<std::pair<std::string, std::string>> accented = {
      {"Á", "á"}, {"É", "é"}, {"Í", "í"}, {"Ó", "ó"}, {"Ú", "ú"}, {"Ñ", "ñ"}, {"Ü", "ü"}};
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len = utf8_length(c);
    std::string_view ch = text.substr(i, len);
    if (len == 1) {
      out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    } else {
      bool replaced = false;
      for (const auto& [upper, lower] : accented) {
        if (ch == upper) {
          out += lower;
          replaced = true;
          break;
        }
      }
      if (!replaced) out += ch;
    }
    i += len;
  }
  return out;
}

std::vector<Token> tokenize(std::string_view sentence, const Grammar& g) {
  std::vector<Token> out;
  std::size_t cp = 0;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < sentence.size()) {
    if (is_space(sentence[i])) {
      ++i;
      ++cp;
      continue;
    }
    std::size_t j = i;
    while (j < sentence.size() && !is_space(sentence[j])) ++j;
    std::string word(sentence.substr(i, j - i));
    const std::size_t word_cp = codepoint_count(word);
    std::string core = word;
    while (strip_prefix(core, kLeading)) {
    }
    const std::size_t lead_cp = word_cp - codepoint_count(core);
    while (strip_suffix(core, kTrailing)) {
    }
    if (!core.empty()) {
      Token t;
      t.text = core;
      std::string lower = to_lower(core);
      t.form = g.lexicon.count(lower) ? lower : core;
      t.start = cp + lead_cp;
      t.end = t.start + codepoint_count(core);
      out.push_back(std::move(t));
    }
    cp += word_cp;
    i = j;
  }
  return out;
}

bool valid_tag(std::string_view tag) {
  static const std::regex pattern(
      "NC[MFC][SPN]000|AQ0[MFC][SPN]0|D[AI]0[MFC][SP]0|DP[123][MFC][SP][SP]|V[MSA]IP[123][SP]0|SPS00");
  return std::regex_match(tag.begin(), tag.end(), pattern);
}

std::vector<MorphAnalysis> analyze_token(std::string_view token, const Grammar& g) {
  std::vector<MorphAnalysis> out;
  auto it = g.lexicon.find(std::string(token));
  if (it == g.lexicon.end()) return out;
  for (const auto& e : it->second) {
    MorphAnalysis a{std::string(token), e.lemma, e.tag, "lexicon"};
    bool seen = false;
    for (const auto& b : out) seen = seen || (b.lemma == a.lemma && b.tag == a.tag);
    if (!seen) out.push_back(std::move(a));
  }
  return out;
}

std::string LexicalEdge::signature() const {
  std::string out = entry ? entry->lex_type : std::string("?");
  for (const auto& r : rules) out += "+" + r;
  return out;
}

std::vector<LexicalEdge> lexical_edges(const MorphAnalysis& analysis, const Grammar& g, std::size_t max_chain) {
  const auto& h = g.hierarchy;
  const auto minus = h.find("-");
  std::vector<LexicalEdge> out;
  auto it = g.lexicon.find(analysis.token);
  if (it == g.lexicon.end()) return out;

  std::vector<const LexicalRule*> tagged;
  std::vector<const LexicalRule*> untagged;
  for (const auto& r : g.lexical_rules) {
    if (r.trigger_tag.empty()) {
      untagged.push_back(&r);
    } else if (r.trigger_tag == analysis.tag) {
      tagged.push_back(&r);
    }
  }
  auto finish = [&](LexicalEdge edge) {
    if (!edge.learner) {
      if (!minus) throw InputError("grammar does not declare the type '-' needed for LEARNER");
      auto r = unify_at(edge.fs, {"LEARNER"}, FeatureStructure(*minus), h);
      if (!r) return;
      edge.fs = std::move(*r.fs);
    }
    out.push_back(std::move(edge));
  };
  auto extend = [&](auto&& self, const LexicalEdge& edge) -> void {
    finish(edge);
    if (edge.rules.size() >= max_chain) return;
    for (const LexicalRule* r : untagged) {
      auto u = unify(edge.fs, r->body, h);
      if (!u) continue;
      LexicalEdge next = edge;
      next.fs = std::move(*u.fs);
      next.rules.push_back(r->id);
      next.learner = next.learner || r->learner;
      self(self, next);
    }
  };

  for (const auto& e : it->second) {
    if (e.lemma != analysis.lemma || e.tag != analysis.tag) continue;
    LexicalEdge base;
    base.entry = &e;
    base.fs = e.fs;
    if (tagged.empty()) {
      extend(extend, base);
      continue;
    }
    if (max_chain == 0) continue;
    for (const LexicalRule* r : tagged) {
      auto u = unify(base.fs, r->body, h);
      if (!u) continue;
      LexicalEdge next = base;
      next.fs = std::move(*u.fs);
      next.rules.push_back(r->id);
      next.learner = r->learner;
      extend(extend, next);
    }
  }
  return out;
}

std::vector<LexicalEdge> token_edges(std::string_view form, const Grammar& g, std::size_t max_chain) {
  std::vector<LexicalEdge> out;
  for (const auto& a : analyze_token(form, g)) {
    auto edges = lexical_edges(a, g, max_chain);
    out.insert(out.end(), std::make_move_iterator(edges.begin()), std::make_move_iterator(edges.end()));
  }
  return out;
}

}  // namespace coach
