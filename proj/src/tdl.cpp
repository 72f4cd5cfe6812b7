#include "tdl.hpp"

#include <cctype>

namespace coach::tdl {

std::string Location::str() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

namespace {

enum class Tok { ident, string, tag, lbrack, rbrack, langle, rangle, comma, dot, amp, assign, ellipsis, annot,
                 directive, eof };

struct Token {
  Tok kind;
  std::string text;
  Location where;
};

bool ident_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '-' || c == '+' || c == '*' || c == '\'' || c >= 0x80;
}

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  Token next() {
    skip_space();
    Location here{file_, line_, col_};
    if (pos_ >= text_.size()) return {Tok::eof, {}, here};
    char c = text_[pos_];
    auto single = [&](Tok k) {
      advance();
      return Token{k, std::string(1, c), here};
    };
    switch (c) {
      case '[': return single(Tok::lbrack);
      case ']': return single(Tok::rbrack);
      case '<': return single(Tok::langle);
      case '>': return single(Tok::rangle);
      case ',': return single(Tok::comma);
      case '&': return single(Tok::amp);
      default: break;
    }
    if (c == ':' && peek(1) == '=') {
      advance();
      advance();
      return {Tok::assign, ":=", here};
    }
    if (c == '.') {
      if (peek(1) == '.' && peek(2) == '.') {
        advance();
        advance();
        advance();
        return {Tok::ellipsis, "...", here};
      }
      advance();
      return {Tok::dot, ".", here};
    }
    if (c == '"') return string_literal(here);
    if (c == '#' || c == '@' || c == '%') {
      advance();
      std::string word = identifier();
      if (word.empty()) throw SyntaxError{here, std::string("expected a name after '") + c + "'"};
      return {c == '#' ? Tok::tag : c == '@' ? Tok::annot : Tok::directive, word, here};
    }
    if (ident_char(static_cast<unsigned char>(c))) return {Tok::ident, identifier(), here};
    throw SyntaxError{here, std::string("unexpected character '") + c + "'"};
  }

 private:
  char peek(std::size_t ahead) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  // Identifiers may contain '.' when it joins two identifier characters, so
  // feature paths (PNG.GEN) lex as one word and a trailing '.' ends a definition.
  std::string identifier() {
    std::string out;
    while (pos_ < text_.size()) {
      unsigned char c = static_cast<unsigned char>(text_[pos_]);
      if (ident_char(c)) {
        out += static_cast<char>(c);
        advance();
      } else if (c == '.' && !out.empty() && ident_char(static_cast<unsigned char>(peek(1)))) {
        out += '.';
        advance();
      } else {
        break;
      }
    }
    return out;
  }

  Token string_literal(const Location& here) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= text_.size() || text_[pos_] == '\n') throw SyntaxError{here, "unterminated string"};
      char c = text_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= text_.size()) throw SyntaxError{here, "unterminated string"};
        out += text_[pos_];
        advance();
        continue;
      }
      out += c;
    }
    return {Tok::string, out, here};
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const std::string& file, std::string section, const IncludeHandler& on_include)
      : lex_(text, file), section_(std::move(section)), on_include_(on_include) {
    shift();
  }

  std::vector<Definition> run() {
    std::vector<Definition> out;
    while (cur_.kind != Tok::eof) {
      if (cur_.kind == Tok::directive) {
        Token d = cur_;
        shift();
        if (d.text == "include") {
          Token target = expect(Tok::string, "include file name");
          if (!on_include_) throw SyntaxError{d.where, "%include is not supported for in-memory sources"};
          auto included = on_include_(target.text, section_, d.where);
          out.insert(out.end(), std::make_move_iterator(included.begin()), std::make_move_iterator(included.end()));
        } else if (d.text == "types" || d.text == "lexicon" || d.text == "lexrules" || d.text == "rules" ||
                   d.text == "root" || d.text == "feedback") {
          section_ = d.text;
        } else {
          throw SyntaxError{d.where, "unknown directive %" + d.text};
        }
        continue;
      }
      out.push_back(definition());
    }
    return out;
  }

 private:
  void shift() { cur_ = lex_.next(); }

  Token expect(Tok k, const char* what) {
    if (cur_.kind != k) throw SyntaxError{cur_.where, std::string("expected ") + what + describe_current()};
    Token t = cur_;
    shift();
    return t;
  }

  std::string describe_current() const {
    if (cur_.kind == Tok::eof) return " but reached end of input";
    return " but found '" + cur_.text + "'";
  }

  static bool starts_value(Tok k) {
    return k == Tok::ident || k == Tok::string || k == Tok::tag || k == Tok::lbrack || k == Tok::langle;
  }

  Definition definition() {
    if (section_.empty()) throw SyntaxError{cur_.where, "definition outside of any section"};
    Definition def;
    def.section = section_;
    def.where = cur_.where;
    def.name = expect(Tok::ident, "a definition name").text;
    expect(Tok::assign, "':='");
    def.body.kind = Term::Kind::conj;
    def.body.where = cur_.where;
    if (cur_.kind != Tok::annot && cur_.kind != Tok::dot) {
      def.body = term(true);
    }
    while (cur_.kind == Tok::annot) {
      std::string key = cur_.text;
      shift();
      std::string value;
      if (cur_.kind == Tok::ident || cur_.kind == Tok::string) {
        value = cur_.text;
        shift();
      }
      def.annotations[key] = value;
    }
    expect(Tok::dot, "'.' ending the definition");
    return def;
  }

  // conj ('&' conj)*, always returned as a conj node.
  Term term(bool top_level) {
    Term t;
    t.kind = Term::Kind::conj;
    t.where = cur_.where;
    t.items.push_back(conjunct(top_level));
    while (cur_.kind == Tok::amp) {
      shift();
      t.items.push_back(conjunct(top_level));
    }
    return t;
  }

  Term conjunct(bool top_level) {
    Term t;
    t.where = cur_.where;
    switch (cur_.kind) {
      case Tok::ident: {
        std::string word = cur_.text;
        shift();
        if (top_level && starts_value(cur_.kind)) {
          // bare PATH value
          Term avm;
          avm.kind = Term::Kind::avm;
          avm.where = t.where;
          avm.avm.push_back({parse_path(word), conjunct_as_term(false)});
          return avm;
        }
        if (word.find('.') != std::string::npos) {
          throw SyntaxError{t.where, "'" + word + "' is a path but no value follows"};
        }
        t.kind = Term::Kind::type;
        t.text = word;
        return t;
      }
      case Tok::string:
        t.kind = Term::Kind::string;
        t.text = cur_.text;
        shift();
        return t;
      case Tok::tag:
        t.kind = Term::Kind::tag;
        t.text = cur_.text;
        shift();
        return t;
      case Tok::lbrack: {
        shift();
        t.kind = Term::Kind::avm;
        if (cur_.kind != Tok::rbrack) {
          while (true) {
            Token feature = expect(Tok::ident, "a feature path");
            t.avm.push_back({parse_path(feature.text), term(false)});
            if (cur_.kind != Tok::comma) break;
            shift();
          }
        }
        expect(Tok::rbrack, "']'");
        return t;
      }
      case Tok::langle: {
        shift();
        t.kind = Term::Kind::list;
        if (cur_.kind != Tok::rangle) {
          while (true) {
            if (cur_.kind == Tok::ellipsis) {
              shift();
              t.open_list = true;
              break;
            }
            t.items.push_back(term(false));
            if (cur_.kind != Tok::comma) break;
            shift();
          }
        }
        expect(Tok::rangle, "'>'");
        return t;
      }
      default:
        throw SyntaxError{cur_.where, "expected a value" + describe_current()};
    }
  }

  Term conjunct_as_term(bool top_level) {
    Term t;
    t.kind = Term::Kind::conj;
    t.where = cur_.where;
    t.items.push_back(conjunct(top_level));
    return t;
  }

  Lexer lex_;
  Token cur_{Tok::eof, {}, {}};
  std::string section_;
  const IncludeHandler& on_include_;
};

}  // namespace

std::vector<Definition> parse(std::string_view text, const std::string& file, const std::string& initial_section,
                              const IncludeHandler& on_include) {
  Parser p(text, file, initial_section, on_include);
  return p.run();
}

}  // namespace coach::tdl
