#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "kgnet/error.hpp"
#include "kgnet/rdf/term.hpp"

namespace kgnet::sparql {

enum class TokenKind {
  End,
  IriRef,      // <...>, text holds the IRI without brackets
  PrefixedName,  // pfx:local, text holds "pfx:local"
  Var,         // ?x or $x, text holds the name
  String,      // "..." or '...', text holds the unescaped value
  LangTag,     // @en, text holds "en"
  DoubleCaret, // ^^
  Integer,
  Decimal,
  Double,
  Blank,       // _:label
  Word,        // keyword or bare identifier (a, SELECT, TrainGML, true, ...)
  Punct,       // { } ( ) . ; , * =
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_word(std::string_view w) const {
    if (kind != TokenKind::Word || text.size() != w.size()) return false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text[i])) !=
          std::toupper(static_cast<unsigned char>(w[i]))) {
        return false;
      }
    }
    return true;
  }
  bool is_punct(char c) const { return kind == TokenKind::Punct && text.size() == 1 && text[0] == c; }
};

/// On-demand SPARQL tokenizer. Positions are tracked so that parsers can
/// report line/column and capture raw substrings (TrainGML payloads).
class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::string_view text() const { return text_; }
  std::size_t offset() const { return pos_; }

  const Token& peek() {
    if (!has_peeked_) {
      peeked_ = scan();
      has_peeked_ = true;
    }
    return peeked_;
  }
  Token next() {
    Token t = peek();
    has_peeked_ = false;
    return t;
  }

  /// Repositions the lexer at a raw byte offset (drops any peeked token).
  void seek(std::size_t offset) {
    has_peeked_ = false;
    while (pos_ < offset && pos_ < text_.size()) advance();
    if (offset < pos_) {
      pos_ = 0;
      line_ = 1;
      col_ = 1;
      while (pos_ < offset) advance();
    }
  }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw ParseError(message, at.line, at.column);
  }
  [[noreturn]] void fail_here(const std::string& message) const {
    throw ParseError(message, line_, col_);
  }

  /// Line/column of a raw byte offset.
  std::pair<std::size_t, std::size_t> position_of(std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  char cur() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = cur();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < text_.size() && cur() != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool name_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || u >= 0x80;
  }

  Token scan() {
    skip_space_and_comments();
    Token t;
    t.offset = pos_;
    t.line = line_;
    t.column = col_;
    if (pos_ >= text_.size()) return t;
    const char c = cur();

    if (c == '<') {
      // IRIREF: no whitespace inside. A lone '<' is not supported.
      std::size_t j = pos_ + 1;
      while (j < text_.size() && text_[j] != '>' && !std::isspace(static_cast<unsigned char>(text_[j]))) ++j;
      if (at(j) != '>') fail_here("unterminated IRI");
      t.kind = TokenKind::IriRef;
      t.text = std::string(text_.substr(pos_ + 1, j - pos_ - 1));
      while (pos_ <= j) advance();
      return t;
    }
    if (c == '?' || c == '$') {
      advance();
      while (name_char(cur())) {
        t.text += cur();
        advance();
      }
      if (t.text.empty()) fail_here("empty variable name");
      t.kind = TokenKind::Var;
      return t;
    }
    if (c == '"' || c == '\'') {
      t.kind = TokenKind::String;
      t.text = string_body(c);
      return t;
    }
    if (c == '@') {
      advance();
      while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '-') {
        t.text += cur();
        advance();
      }
      if (t.text.empty()) fail_here("empty language tag");
      t.kind = TokenKind::LangTag;
      return t;
    }
    if (c == '^' && at(pos_ + 1) == '^') {
      advance();
      advance();
      t.kind = TokenKind::DoubleCaret;
      t.text = "^^";
      return t;
    }
    if (c == '_' && at(pos_ + 1) == ':') {
      advance();
      advance();
      while (name_char(cur()) || (cur() == '.' && name_char(at(pos_ + 1)))) {
        t.text += cur();
        advance();
      }
      if (t.text.empty()) fail_here("empty blank node label");
      t.kind = TokenKind::Blank;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && std::isdigit(static_cast<unsigned char>(at(pos_ + 1))))) {
      return number(t);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == ':' || c == '_' ||
        static_cast<unsigned char>(c) >= 0x80) {
      // Word or prefixed name. Local parts may contain '-', '.', ':' but not end in '.'.
      std::string word;
      while (name_char(cur())) {
        word += cur();
        advance();
      }
      if (cur() == ':') {
        word += ':';
        advance();
        while (name_char(cur()) || cur() == ':' || cur() == '%' ||
               (cur() == '.' && (name_char(at(pos_ + 1)) || at(pos_ + 1) == ':'))) {
          word += cur();
          advance();
        }
        t.kind = TokenKind::PrefixedName;
      } else {
        t.kind = TokenKind::Word;
      }
      t.text = std::move(word);
      return t;
    }
    if (std::string_view("{}().;,*=").find(c) != std::string_view::npos) {
      t.kind = TokenKind::Punct;
      t.text = std::string(1, c);
      advance();
      return t;
    }
    fail_here(std::string("unexpected character '") + c + "'");
  }

  Token number(Token& t) {
    std::string num;
    if (cur() == '+' || cur() == '-') {
      num += cur();
      advance();
    }
    while (std::isdigit(static_cast<unsigned char>(cur()))) {
      num += cur();
      advance();
    }
    t.kind = TokenKind::Integer;
    if (cur() == '.' && std::isdigit(static_cast<unsigned char>(at(pos_ + 1)))) {
      num += '.';
      advance();
      while (std::isdigit(static_cast<unsigned char>(cur()))) {
        num += cur();
        advance();
      }
      t.kind = TokenKind::Decimal;
    }
    if (cur() == 'e' || cur() == 'E') {
      const std::size_t save_pos = pos_;
      const std::size_t save_line = line_, save_col = col_;
      std::string exp(1, cur());
      advance();
      if (cur() == '+' || cur() == '-') {
        exp += cur();
        advance();
      }
      if (std::isdigit(static_cast<unsigned char>(cur()))) {
        while (std::isdigit(static_cast<unsigned char>(cur()))) {
          exp += cur();
          advance();
        }
        num += exp;
        t.kind = TokenKind::Double;
      } else {
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
      }
    }
    t.text = std::move(num);
    return t;
  }

  std::string string_body(char quote) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail_here("unterminated string");
      const char c = cur();
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\n') fail_here("newline in string literal");
      if (c == '\\') {
        advance();
        const char e = cur();
        switch (e) {
          case 't': out += '\t'; break;
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          case 'u':
          case 'U': {
            const std::size_t len = e == 'u' ? 4 : 8;
            advance();
            std::uint32_t cp = 0;
            for (std::size_t i = 0; i < len; ++i) {
              const char h = cur();
              if (!std::isxdigit(static_cast<unsigned char>(h))) fail_here("bad unicode escape");
              cp = (cp << 4) | static_cast<std::uint32_t>(
                                   std::isdigit(static_cast<unsigned char>(h))
                                       ? h - '0'
                                       : (std::tolower(static_cast<unsigned char>(h)) - 'a' + 10));
              advance();
            }
            rdf::append_utf8(out, cp);
            continue;
          }
          default: fail_here(std::string("unknown escape \\") + e);
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token peeked_;
  bool has_peeked_ = false;
};

/// Prefix table with SPARQL's prefixed-name expansion.
using PrefixMap = std::map<std::string, std::string>;

inline std::string expand_prefixed(const PrefixMap& prefixes, std::string_view pname,
                                   const Lexer* lexer = nullptr, const Token* at = nullptr) {
  const auto colon = pname.find(':');
  const std::string prefix(pname.substr(0, colon));
  auto it = prefixes.find(prefix);
  if (it == prefixes.end()) {
    const std::string msg = "undeclared prefix '" + prefix + ":'";
    if (lexer != nullptr && at != nullptr) lexer->fail(msg, *at);
    throw SemanticError(msg);
  }
  return it->second + std::string(pname.substr(colon + 1));
}

/// Shared term grammar: IRIs, prefixed names, `a`, literals, numbers, booleans,
/// variables and blank nodes.
inline rdf::Term parse_term(Lexer& lex, const PrefixMap& prefixes) {
  Token t = lex.next();
  try {
    switch (t.kind) {
      case TokenKind::IriRef: return rdf::Term::iri(t.text);
      case TokenKind::PrefixedName: return rdf::Term::iri(expand_prefixed(prefixes, t.text, &lex, &t));
      case TokenKind::Var: return rdf::Term::variable(t.text);
      case TokenKind::Blank: return rdf::Term::blank(t.text);
      case TokenKind::Integer: return rdf::Term::literal(t.text, std::string(rdf::vocab::kXsdInteger));
      case TokenKind::Decimal: return rdf::Term::literal(t.text, std::string(rdf::vocab::kXsdDecimal));
      case TokenKind::Double: return rdf::Term::literal(t.text, std::string(rdf::vocab::kXsdDouble));
      case TokenKind::String: {
        const Token& n = lex.peek();
        if (n.kind == TokenKind::LangTag) {
          std::string lang = lex.next().text;
          return rdf::Term::literal(t.text, {}, lang);
        }
        if (n.kind == TokenKind::DoubleCaret) {
          lex.next();
          Token dt = lex.next();
          if (dt.kind == TokenKind::IriRef) return rdf::Term::literal(t.text, dt.text);
          if (dt.kind == TokenKind::PrefixedName) {
            return rdf::Term::literal(t.text, expand_prefixed(prefixes, dt.text, &lex, &dt));
          }
          lex.fail("expected datatype IRI after '^^'", dt);
        }
        return rdf::Term::literal(t.text);
      }
      case TokenKind::Word:
        if (t.is_word("a") && t.text == "a") return rdf::rdf_type();
        if (t.is_word("true") || t.is_word("false")) {
          std::string v = t.text;
          for (auto& ch : v) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
          return rdf::Term::literal(v, std::string(rdf::vocab::kXsdBoolean));
        }
        break;
      default: break;
    }
  } catch (const ParseError&) {
    throw;
  } catch (const UserError& e) {
    lex.fail(e.what(), t);
  }
  lex.fail(t.kind == TokenKind::End ? "unexpected end of query" : "unexpected '" + t.text + "'", t);
}

inline void expect_punct(Lexer& lex, char c) {
  Token t = lex.next();
  if (!t.is_punct(c)) {
    lex.fail(std::string("expected '") + c + "'" +
                 (t.kind == TokenKind::End ? " before end of query" : " but found '" + t.text + "'"),
             t);
  }
}

inline void expect_word(Lexer& lex, std::string_view w) {
  Token t = lex.next();
  if (!t.is_word(w)) lex.fail("expected " + std::string(w), t);
}

/// PREFIX/BASE declarations. BASE is accepted and ignored.
inline PrefixMap parse_prologue(Lexer& lex) {
  PrefixMap prefixes;
  while (true) {
    const Token& t = lex.peek();
    if (t.is_word("PREFIX")) {
      lex.next();
      Token name = lex.next();
      if (name.kind != TokenKind::PrefixedName || name.text.back() != ':' ||
          name.text.find(':') != name.text.size() - 1) {
        lex.fail("expected prefix name ending in ':'", name);
      }
      Token iri = lex.next();
      if (iri.kind != TokenKind::IriRef) lex.fail("expected IRI in PREFIX declaration", iri);
      prefixes[name.text.substr(0, name.text.size() - 1)] = iri.text;
    } else if (t.is_word("BASE")) {
      lex.next();
      Token iri = lex.next();
      if (iri.kind != TokenKind::IriRef) lex.fail("expected IRI in BASE declaration", iri);
    } else {
      break;
    }
  }
  return prefixes;
}

/// Triples block with '.', ';' and ',' abbreviations. Stops before '}'.
/// `on_triple` receives each pattern; `stop` lets callers end early on a token.
template <typename OnTriple>
void parse_triples_block(Lexer& lex, const PrefixMap& prefixes, OnTriple&& on_triple) {
  while (true) {
    const Token& t = lex.peek();
    if (t.is_punct('}') || t.kind == TokenKind::End) return;
    if (t.is_punct('{')) lex.fail("nested group patterns are not supported here", t);
    rdf::Term subject = parse_term(lex, prefixes);
    while (true) {
      rdf::Term predicate = parse_term(lex, prefixes);
      while (true) {
        rdf::Term object = parse_term(lex, prefixes);
        on_triple(rdf::TriplePattern{subject, predicate, object});
        if (!lex.peek().is_punct(',')) break;
        lex.next();
      }
      if (!lex.peek().is_punct(';')) break;
      lex.next();
      // Trailing ';' before '.' or '}'.
      if (lex.peek().is_punct('.') || lex.peek().is_punct('}')) break;
    }
    const Token& end = lex.peek();
    if (end.is_punct('.')) {
      lex.next();
      continue;
    }
    if (end.is_punct('}')) return;
    lex.fail("expected '.' or '}' after triple pattern", end);
  }
}

}  // namespace kgnet::sparql
