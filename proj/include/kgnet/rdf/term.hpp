#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "kgnet/error.hpp"

namespace kgnet::rdf {

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfLangString =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view kXsdDecimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view kXsdBoolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view kXsdDateTime = "http://www.w3.org/2001/XMLSchema#dateTime";
inline constexpr std::string_view kKgnet = "https://www.kgnet.com/";
}  // namespace vocab

/// An absolute IRI, e.g. `https://www.dblp.org/Publication`.
struct Iri {
  std::string value;
  auto operator<=>(const Iri&) const = default;
};

/// Literal compared by (lexical form, datatype, language) exactly. An empty
/// datatype denotes a simple literal; `xsd:string` is normalized to empty.
struct Literal {
  std::string lexical;
  std::string datatype;
  std::string lang;
  auto operator<=>(const Literal&) const = default;
};

struct Variable {
  std::string name;
  auto operator<=>(const Variable&) const = default;
};

struct Blank {
  std::string label;
  auto operator<=>(const Blank&) const = default;
};

inline bool is_absolute_iri(std::string_view iri) {
  if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri.front()))) return false;
  std::size_t i = 1;
  while (i < iri.size()) {
    const char c = iri[i];
    if (c == ':') break;
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
      return false;
    }
    ++i;
  }
  if (i >= iri.size()) return false;
  for (const char c : iri) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      return false;
    }
  }
  return true;
}

/// Graph names may be relative references such as `kgnet` (the KGMeta graph).
inline bool is_valid_graph_name(std::string_view name) {
  if (name.empty()) return false;
  for (const char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      return false;
    }
  }
  return true;
}

inline bool is_valid_variable_name(std::string_view name) {
  if (name.empty()) return false;
  for (const char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80) continue;
    if (!std::isalnum(u) && c != '_' && c != '-') return false;
  }
  return true;
}

class Term {
 public:
  enum class Kind : std::uint8_t { Iri = 0, Literal = 1, Variable = 2, Blank = 3 };

  Term() : value_(rdf::Iri{}) {}

  static Term iri(std::string value) {
    if (!is_absolute_iri(value)) throw UserError("not an absolute IRI: <" + value + ">");
    return Term(rdf::Iri{std::move(value)});
  }
  static Term literal(std::string lexical, std::string datatype = {}, std::string lang = {}) {
    if (!lang.empty()) {
      datatype.clear();
    } else if (datatype == vocab::kXsdString) {
      datatype.clear();
    } else if (!datatype.empty() && !is_absolute_iri(datatype)) {
      throw UserError("literal datatype is not an absolute IRI: <" + datatype + ">");
    }
    return Term(rdf::Literal{std::move(lexical), std::move(datatype), std::move(lang)});
  }
  static Term integer(long long value) {
    return literal(std::to_string(value), std::string(vocab::kXsdInteger));
  }
  static Term variable(std::string name) {
    if (!is_valid_variable_name(name)) throw UserError("invalid variable name: ?" + name);
    return Term(rdf::Variable{std::move(name)});
  }
  static Term blank(std::string label) {
    if (label.empty()) throw UserError("empty blank node label");
    return Term(rdf::Blank{std::move(label)});
  }

  Kind kind() const noexcept { return static_cast<Kind>(value_.index()); }
  bool is_iri() const noexcept { return kind() == Kind::Iri; }
  bool is_literal() const noexcept { return kind() == Kind::Literal; }
  bool is_variable() const noexcept { return kind() == Kind::Variable; }
  bool is_blank() const noexcept { return kind() == Kind::Blank; }
  /// IRI or blank node: something that can be the subject of a triple.
  bool is_resource() const noexcept { return is_iri() || is_blank(); }

  /// IRI string, literal lexical form, variable name, or blank label.
  const std::string& value() const noexcept {
    switch (kind()) {
      case Kind::Iri: return std::get<rdf::Iri>(value_).value;
      case Kind::Literal: return std::get<rdf::Literal>(value_).lexical;
      case Kind::Variable: return std::get<rdf::Variable>(value_).name;
      case Kind::Blank: break;
    }
    return std::get<rdf::Blank>(value_).label;
  }
  const rdf::Literal& as_literal() const { return std::get<rdf::Literal>(value_); }
  const std::string& datatype() const { return as_literal().datatype; }
  const std::string& lang() const { return as_literal().lang; }

  /// N-Triples / SPARQL spelling: `<iri>`, `"lex"^^<dt>`, `"lex"@en`, `?v`, `_:b`.
  std::string to_string() const;

  bool operator==(const Term&) const = default;
  std::strong_ordering operator<=>(const Term& other) const {
    if (auto c = value_.index() <=> other.value_.index(); c != 0) return c;
    return std::visit(
        [&](const auto& lhs) -> std::strong_ordering {
          using T = std::decay_t<decltype(lhs)>;
          return lhs <=> std::get<T>(other.value_);
        },
        value_);
  }

 private:
  template <typename T>
  explicit Term(T v) : value_(std::move(v)) {}

  std::variant<rdf::Iri, rdf::Literal, rdf::Variable, rdf::Blank> value_;
};

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::string escape_literal(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size() + 2);
  for (const char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string Term::to_string() const {
  switch (kind()) {
    case Kind::Iri: return "<" + value() + ">";
    case Kind::Variable: return "?" + value();
    case Kind::Blank: return "_:" + value();
    case Kind::Literal: break;
  }
  const auto& lit = as_literal();
  std::string out = "\"" + escape_literal(lit.lexical) + "\"";
  if (!lit.lang.empty()) {
    out += "@" + lit.lang;
  } else if (!lit.datatype.empty()) {
    out += "^^<" + lit.datatype + ">";
  }
  return out;
}

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    std::size_t h = std::hash<std::string>{}(t.value());
    h = hash_combine(h, static_cast<std::size_t>(t.kind()));
    if (t.is_literal()) {
      h = hash_combine(h, std::hash<std::string>{}(t.datatype()));
      h = hash_combine(h, std::hash<std::string>{}(t.lang()));
    }
    return h;
  }
};

/// An RDF statement; subject is an IRI or blank node, predicate an IRI, and
/// the object anything but a variable.
struct Triple {
  Term subject;
  Term predicate;
  Term object;

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;

  /// Throws UserError describing the first violated position.
  void validate() const {
    if (!subject.is_resource()) throw UserError("triple subject must be an IRI or blank node");
    if (!predicate.is_iri()) throw UserError("triple predicate must be an IRI");
    if (object.is_variable()) throw UserError("triple object must not be a variable");
  }
  bool valid() const noexcept {
    return subject.is_resource() && predicate.is_iri() && !object.is_variable();
  }
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    TermHash h;
    return hash_combine(hash_combine(h(t.subject), h(t.predicate)), h(t.object));
  }
};

/// A triple whose positions may be variables.
struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  bool operator==(const TriplePattern&) const = default;
  auto operator<=>(const TriplePattern&) const = default;

  void validate() const {
    if (subject.is_literal()) throw UserError("pattern subject must not be a literal");
    if (!predicate.is_iri() && !predicate.is_variable()) {
      throw UserError("pattern predicate must be an IRI or variable");
    }
  }
  bool mentions(std::string_view var) const {
    return (subject.is_variable() && subject.value() == var) ||
           (predicate.is_variable() && predicate.value() == var) ||
           (object.is_variable() && object.value() == var);
  }
};

inline TriplePattern to_pattern(const Triple& t) { return {t.subject, t.predicate, t.object}; }

inline Term rdf_type() { return Term::iri(std::string(vocab::kRdfType)); }
inline Term kgnet_term(std::string_view local) {
  return Term::iri(std::string(vocab::kKgnet) + std::string(local));
}

/// Local name of an IRI: the part after the last '#', '/' or ':'.
inline std::string local_name(std::string_view iri) {
  const auto pos = iri.find_last_of("#/:");
  if (pos == std::string_view::npos || pos + 1 >= iri.size()) return std::string(iri);
  return std::string(iri.substr(pos + 1));
}

}  // namespace kgnet::rdf
