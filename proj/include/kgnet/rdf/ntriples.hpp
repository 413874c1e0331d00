#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/rdf/term.hpp"

namespace kgnet::rdf {

class NTriplesError : public UserError {
 public:
  NTriplesError(std::size_t line, const std::string& reason)
      : UserError("N-Triples line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

class NtCursor {
 public:
  explicit NtCursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  std::size_t pos() const { return pos_; }
  void skip_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  Term term() {
    skip_ws();
    switch (peek()) {
      case '<': return Term::iri(iriref());
      case '_': return blank();
      case '"': return literal();
      default: break;
    }
    fail("expected '<', '_:' or '\"'");
  }

  std::string iriref() {
    expect('<');
    std::string out;
    while (!done() && peek() != '>') {
      char c = text_[pos_++];
      if (c == '\\') {
        out += uchar();
      } else {
        out += c;
      }
    }
    expect('>');
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw UserError(what + " (offset " + std::to_string(pos_) + ")");
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

 private:
  Term blank() {
    expect('_');
    expect(':');
    std::string label;
    while (!done()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '.' || c == '<' || c == '"') {
        // A trailing '.' terminates the statement, inner dots belong to the label.
        if (c == '.' && pos_ + 1 < text_.size() && text_[pos_ + 1] != ' ' &&
            text_[pos_ + 1] != '\t' && text_[pos_ + 1] != '#') {
          label += c;
          ++pos_;
          continue;
        }
        break;
      }
      label += c;
      ++pos_;
    }
    return Term::blank(label);
  }

  Term literal() {
    expect('"');
    std::string lexical;
    while (!done() && peek() != '"') {
      char c = text_[pos_++];
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (done()) fail("dangling escape");
      const char e = text_[pos_];
      switch (e) {
        case 't': lexical += '\t'; ++pos_; break;
        case 'b': lexical += '\b'; ++pos_; break;
        case 'n': lexical += '\n'; ++pos_; break;
        case 'r': lexical += '\r'; ++pos_; break;
        case 'f': lexical += '\f'; ++pos_; break;
        case '"': lexical += '"'; ++pos_; break;
        case '\'': lexical += '\''; ++pos_; break;
        case '\\': lexical += '\\'; ++pos_; break;
        case 'u':
        case 'U': lexical += uchar(); break;
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    expect('"');
    if (peek() == '@') {
      ++pos_;
      std::string lang;
      while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        lang += text_[pos_++];
      }
      if (lang.empty()) fail("empty language tag");
      return Term::literal(std::move(lexical), {}, std::move(lang));
    }
    if (peek() == '^') {
      expect('^');
      expect('^');
      return Term::literal(std::move(lexical), iriref());
    }
    return Term::literal(std::move(lexical));
  }

  // Reads the hex digits of a \u or \U escape; the backslash is consumed.
  std::string uchar() {
    if (done()) fail("dangling escape");
    const char kind = text_[pos_++];
    std::size_t len = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (len == 0) fail("invalid escape in IRI");
    if (pos_ + len > text_.size()) fail("truncated unicode escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const char h = text_[pos_++];
      cp <<= 4;
      if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
      else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
      else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
      else fail("bad hex digit in unicode escape");
    }
    std::string out;
    append_utf8(out, cp);
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a single N-Triples term (`<iri>`, `_:b`, or a literal).
inline Term parse_ntriples_term(std::string_view text) {
  detail::NtCursor cur(text);
  Term t = cur.term();
  cur.skip_ws();
  if (!cur.done()) cur.fail("trailing characters after term");
  return t;
}

/// Parses one statement line. Returns false for blank and comment lines.
inline bool parse_ntriples_line(std::string_view line, std::size_t line_no, Triple& out) {
  std::size_t first = line.find_first_not_of(" \t\r");
  if (first == std::string_view::npos || line[first] == '#') return false;
  if (line.back() == '\r') line.remove_suffix(1);
  try {
    detail::NtCursor cur(line);
    out.subject = cur.term();
    out.predicate = cur.term();
    out.object = cur.term();
    cur.skip_ws();
    if (cur.peek() != '.') throw UserError("statement not terminated by '.'");
    cur.expect('.');
    cur.skip_ws();
    if (!cur.done() && cur.peek() != '#') throw UserError("trailing characters after '.'");
    out.validate();
  } catch (const NTriplesError&) {
    throw;
  } catch (const UserError& e) {
    throw NTriplesError(line_no, e.what());
  }
  return true;
}

inline std::vector<Triple> parse_ntriples(std::istream& in) {
  std::vector<Triple> out;
  std::string line;
  std::size_t line_no = 0;
  Triple t;
  while (std::getline(in, line)) {
    ++line_no;
    if (parse_ntriples_line(line, line_no, t)) out.push_back(t);
  }
  return out;
}

inline std::vector<Triple> parse_ntriples(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in);
}

inline std::vector<Triple> read_ntriples_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open N-Triples file: " + path);
  return parse_ntriples(in);
}

/// Canonical form: one statement per line, single spaces, terminated by " .\n".
inline std::string to_ntriples_line(const Triple& t) {
  return t.subject.to_string() + " " + t.predicate.to_string() + " " + t.object.to_string() +
         " .\n";
}

inline void write_ntriples(std::ostream& out, const std::vector<Triple>& triples) {
  for (const auto& t : triples) out << to_ntriples_line(t);
}

inline std::string serialize_ntriples(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) out += to_ntriples_line(t);
  return out;
}

inline void write_ntriples_file(const std::string& path, const std::vector<Triple>& triples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write N-Triples file: " + path);
  write_ntriples(out, triples);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace kgnet::rdf
