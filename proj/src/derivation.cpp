#include "coach/derivation.hpp"

#include <cctype>

#include "coach/errors.hpp"

namespace coach {

namespace {

std::string quote_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

void write(const DerivationNode& n, std::string& out) {
  out += '(';
  if (n.learner) out += '~';
  out += n.label + ' ' + std::to_string(n.start) + ' ' + std::to_string(n.end);
  if (n.kind == DerivationNode::Kind::lexeme) {
    out += ' ' + quote_string(n.surface);
  } else {
    for (const auto& c : n.children) {
      out += ' ';
      write(c, out);
    }
  }
  out += ')';
}

void write_pretty(const DerivationNode& n, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.learner) out += '~';
  out += n.label + " [" + std::to_string(n.start) + "," + std::to_string(n.end) + "]";
  if (n.kind == DerivationNode::Kind::lexeme) out += " " + quote_string(n.surface);
  out += '\n';
  for (const auto& c : n.children) write_pretty(c, depth + 1, out);
}

class Reader {
 public:
  Reader(std::string_view text, const Grammar& g) : text_(text), g_(g) {}

  DerivationNode read_all() {
    DerivationNode n = node();
    skip();
    if (pos_ != text_.size()) fail("trailing text");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("bad derivation at offset " + std::to_string(pos_) + ": " + why);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string word() {
    skip();
    std::size_t b = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != '"')
      ++pos_;
    if (b == pos_) fail("expected a word");
    return std::string(text_.substr(b, pos_ - b));
  }

  std::size_t number() {
    std::string w = word();
    for (char c : w) {
      if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected a number, got '" + w + "'");
    }
    return std::stoul(w);
  }

  std::string string_literal() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  DerivationNode node() {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    ++pos_;
    DerivationNode n;
    std::string label = word();
    if (!label.empty() && label[0] == '~') {
      n.learner = true;
      label.erase(0, 1);
    }
    n.label = label;
    n.start = number();
    n.end = number();
    if (n.end <= n.start) fail("empty span for '" + label + "'");
    skip();
    if (pos_ < text_.size() && text_[pos_] == '"') {
      n.kind = DerivationNode::Kind::lexeme;
      n.surface = string_literal();
      const LexicalEntry* e = g_.entry(label);
      if (!e) throw InputError("derivation names unknown lexical entry '" + label + "'");
      if (e->surface != n.surface) {
        throw InputError("derivation leaf '" + label + "' has surface \"" + n.surface + "\", expected \"" +
                         e->surface + "\"");
      }
      if (n.end != n.start + 1) fail("leaf '" + label + "' must span one token");
    } else {
      while (true) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == '(') {
          n.children.push_back(node());
        } else {
          break;
        }
      }
      if (n.children.empty()) fail("node '" + label + "' has no children");
      if (const LexicalRule* r = g_.lexical_rule(label)) {
        n.kind = DerivationNode::Kind::lexrule;
        if (n.children.size() != 1) fail("lexical rule '" + label + "' must have one child");
        if (r->learner != n.learner) fail("learner marking of '" + label + "' does not match the grammar");
      } else if (const PhrasalRule* r = g_.phrasal_rule(label)) {
        n.kind = DerivationNode::Kind::phrasal;
        n.head_index = r->head_index;
        if (n.children.size() != r->arity) fail("rule '" + label + "' has the wrong number of daughters");
        if (r->learner != n.learner) fail("learner marking of '" + label + "' does not match the grammar");
      } else {
        throw InputError("derivation names unknown rule '" + label + "'");
      }
      std::size_t at = n.start;
      for (const auto& c : n.children) {
        if (c.start != at) fail("children of '" + label + "' do not tile its span");
        at = c.end;
      }
      if (at != n.end) fail("children of '" + label + "' do not tile its span");
    }
    skip();
    if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
    ++pos_;
    return n;
  }

  std::string_view text_;
  const Grammar& g_;
  std::size_t pos_ = 0;
};

void collect_leaves(const DerivationNode& n, std::vector<const DerivationNode*>& out) {
  if (n.kind == DerivationNode::Kind::lexeme) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

}  // namespace

std::string DerivationNode::canonical() const {
  std::string out;
  write(*this, out);
  return out;
}

std::size_t DerivationNode::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

std::string DerivationNode::pretty() const {
  std::string out;
  write_pretty(*this, 0, out);
  return out;
}

DerivationNode parse_derivation(std::string_view text, const Grammar& g) { return Reader(text, g).read_all(); }

std::vector<const DerivationNode*> derivation_leaves(const DerivationNode& root) {
  std::vector<const DerivationNode*> out;
  collect_leaves(root, out);
  return out;
}

}  // namespace coach
