#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <regex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kgnet/error.hpp"
#include "kgnet/sparql/lexer.hpp"
#include "kgnet/sparqlml/ast.hpp"

namespace kgnet::sparqlml {

namespace detail {

/// Parser for the relaxed object notation of TrainGML payloads: unquoted
/// keys (spaces and '-' allowed), single- or double-quoted strings, and bare
/// scalar values such as `dblp:venue`, `50GB` or `ModelScore`.
class RelaxedJson {
 public:
  explicit RelaxedJson(std::string_view text) : text_(text) {}

  nlohmann::json parse() {
    nlohmann::json v = value();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw UserError("TrainGML payload: " + what + " at offset " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  nlohmann::json value() {
    const char c = peek();
    if (c == '{') return object();
    if (c == '[') return array();
    if (c == '"' || c == '\'') return quoted();
    if (c == '\0') fail("unexpected end of payload");
    return bare();
  }

  nlohmann::json object() {
    ++pos_;
    nlohmann::json obj = nlohmann::json::object();
    while (true) {
      if (peek() == '}') {
        ++pos_;
        return obj;
      }
      std::string key;
      if (peek() == '"' || peek() == '\'') {
        key = quoted().get<std::string>();
      } else {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ':' && text_[pos_] != '{' &&
               text_[pos_] != '}' && text_[pos_] != ',') {
          ++pos_;
        }
        key = trim(text_.substr(start, pos_ - start));
      }
      if (key.empty()) fail("empty key");
      if (peek() != ':') fail("expected ':' after key '" + key + "'");
      ++pos_;
      if (obj.contains(key)) fail("duplicate key '" + key + "'");
      obj[key] = value();
      const char sep = peek();
      if (sep == ',') {
        ++pos_;
      } else if (sep != '}') {
        fail("expected ',' or '}'");
      }
    }
  }

  nlohmann::json array() {
    ++pos_;
    nlohmann::json arr = nlohmann::json::array();
    while (true) {
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value());
      const char sep = peek();
      if (sep == ',') {
        ++pos_;
      } else if (sep != ']') {
        fail("expected ',' or ']'");
      }
    }
  }

  nlohmann::json quoted() {
    const char q = text_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string");
      const char c = text_[pos_++];
      if (c == q) break;
      if (c == '\\' && pos_ < text_.size()) {
        const char e = text_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: out += e;
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  nlohmann::json bare() {
    const std::size_t start = pos_;
    bool in_iri = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '<') in_iri = true;
      if (c == '>') in_iri = false;
      if (!in_iri && (c == ',' || c == '}' || c == ']')) break;
      ++pos_;
    }
    const std::string s = trim(text_.substr(start, pos_ - start));
    if (s.empty()) fail("empty value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s == "null") return nullptr;
    static const std::regex kInt("[-+]?[0-9]+");
    static const std::regex kNum("[-+]?[0-9]+(\\.[0-9]+)?([eE][-+]?[0-9]+)?");
    if (std::regex_match(s, kInt)) return std::stoll(s);
    if (std::regex_match(s, kNum)) return std::stod(s);
    return s;
  }

  static std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// "Task Budget", "task_budget" and "TaskBudget" compare equal.
inline std::string normalize_key(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == ' ' || c == '-' || c == '_') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

inline const nlohmann::json* find_key(const nlohmann::json& obj,
                                      std::initializer_list<std::string_view> names) {
  if (!obj.is_object()) return nullptr;
  for (const auto& [k, v] : obj.items()) {
    const std::string nk = normalize_key(k);
    for (auto n : names) {
      if (nk == normalize_key(n)) return &v;
    }
  }
  return nullptr;
}

inline std::string scalar_text(const nlohmann::json& v, std::string_view what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  throw UserError(std::string(what) + " must be a scalar value");
}

inline std::string resolve_iri(const nlohmann::json& v, std::string_view what,
                               const sparql::PrefixMap& prefixes) {
  std::string s = scalar_text(v, what);
  std::string iri;
  if (s.size() >= 2 && s.front() == '<' && s.back() == '>') {
    iri = s.substr(1, s.size() - 2);
  } else if (s.find("://") != std::string::npos) {
    iri = s;
  } else if (auto colon = s.find(':'); colon != std::string::npos) {
    auto it = prefixes.find(s.substr(0, colon));
    if (it == prefixes.end()) {
      throw UserError(std::string(what) + ": undeclared prefix '" + s.substr(0, colon + 1) + "'");
    }
    iri = it->second + s.substr(colon + 1);
  } else {
    throw UserError(std::string(what) + ": expected an IRI or prefixed name, got '" + s + "'");
  }
  if (!rdf::is_absolute_iri(iri)) {
    throw UserError(std::string(what) + ": not an absolute IRI <" + iri + ">");
  }
  return iri;
}

struct UnitQuantity {
  double amount;
  std::string unit;
};

inline UnitQuantity split_quantity(const nlohmann::json& v, std::string_view what) {
  if (v.is_number()) return {v.get<double>(), ""};
  static const std::regex kQty("\\s*([0-9]+(?:\\.[0-9]+)?)\\s*([A-Za-z]*)\\s*");
  std::smatch m;
  const std::string s = scalar_text(v, what);
  if (!std::regex_match(s, m, kQty)) {
    throw UserError(std::string(what) + ": cannot parse quantity '" + s + "'");
  }
  std::string unit = m[2];
  for (auto& c : unit) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return {std::stod(m[1]), unit};
}

inline std::uint64_t positive_whole(double value, std::string_view what) {
  const double r = std::round(value);
  if (!(r >= 1) || r > 9.0e18) throw UserError(std::string(what) + " must be strictly positive");
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

/// Bytes for a memory quantity. Units are binary: KB = KiB = 2^10.
inline std::uint64_t parse_memory(const nlohmann::json& v) {
  if (v.is_number_integer()) {
    if (v.get<long long>() <= 0) throw UserError("MaxMemory must be strictly positive");
    return v.get<std::uint64_t>();
  }
  auto q = detail::split_quantity(v, "MaxMemory");
  double mult = 0;
  if (q.unit.empty() || q.unit == "b") mult = 1;
  else if (q.unit == "k" || q.unit == "kb" || q.unit == "kib") mult = 1024.0;
  else if (q.unit == "m" || q.unit == "mb" || q.unit == "mib") mult = 1024.0 * 1024;
  else if (q.unit == "g" || q.unit == "gb" || q.unit == "gib") mult = 1024.0 * 1024 * 1024;
  else if (q.unit == "t" || q.unit == "tb" || q.unit == "tib") mult = 1024.0 * 1024 * 1024 * 1024;
  else throw UserError("MaxMemory: unknown unit suffix '" + q.unit + "'");
  return detail::positive_whole(q.amount * mult, "MaxMemory");
}

/// Seconds for a duration quantity (s, m/min, h, d; bare numbers are seconds).
inline std::uint64_t parse_duration(const nlohmann::json& v) {
  if (v.is_number_integer()) {
    if (v.get<long long>() <= 0) throw UserError("MaxTime must be strictly positive");
    return v.get<std::uint64_t>();
  }
  auto q = detail::split_quantity(v, "MaxTime");
  double mult = 0;
  const std::string& u = q.unit;
  if (u.empty() || u == "s" || u == "sec" || u == "secs" || u == "second" || u == "seconds") mult = 1;
  else if (u == "m" || u == "min" || u == "mins" || u == "minute" || u == "minutes") mult = 60;
  else if (u == "h" || u == "hr" || u == "hrs" || u == "hour" || u == "hours") mult = 3600;
  else if (u == "d" || u == "day" || u == "days") mult = 86400;
  else throw UserError("MaxTime: unknown unit suffix '" + u + "'");
  return detail::positive_whole(q.amount * mult, "MaxTime");
}

inline Priority parse_priority(const nlohmann::json& v) {
  std::string s = detail::scalar_text(v, "Priority");
  if (auto colon = s.rfind(':'); colon != std::string::npos) s = s.substr(colon + 1);
  const std::string n = detail::normalize_key(s);
  if (n == "modelscore" || n == "score" || n == "accuracy") return Priority::ModelScore;
  if (n == "trainingtime" || n == "time") return Priority::TrainingTime;
  if (n == "memory") return Priority::Memory;
  throw UserError("Priority: unknown value '" + s + "'");
}

inline SamplingOverride parse_sampling(const nlohmann::json& v) {
  SamplingOverride s;
  if (v.is_object()) {
    const auto* d = detail::find_key(v, {"d", "direction"});
    const auto* h = detail::find_key(v, {"h", "hops"});
    if (!d || !h || !d->is_number_integer() || !h->is_number_integer()) {
      throw UserError("Sampling: expected {d: 1|2, h: 1|2}");
    }
    s = {d->get<int>(), h->get<int>()};
  } else {
    static const std::regex kDh("d([0-9]+)h([0-9]+)");
    std::smatch m;
    const std::string text = detail::scalar_text(v, "Sampling");
    if (!std::regex_match(text, m, kDh)) throw UserError("Sampling: expected 'd<1|2>h<1|2>'");
    s = {std::stoi(m[1]), std::stoi(m[2])};
  }
  if ((s.d != 1 && s.d != 2) || (s.h != 1 && s.h != 2)) {
    throw UserError("Sampling: d and h must each be 1 or 2");
  }
  return s;
}

/// Parses a TrainGML payload, strict JSON or the relaxed notation of the
/// paper's example. Prefixed names are expanded with `prefixes`.
inline TrainGmlSpec parse_train_json(std::string_view text, const sparql::PrefixMap& prefixes = {}) {
  nlohmann::json root = nlohmann::json::parse(text, nullptr, false);
  if (root.is_discarded()) root = detail::RelaxedJson(text).parse();
  if (!root.is_object()) throw UserError("TrainGML payload must be an object");

  auto require = [&](const nlohmann::json& obj, std::initializer_list<std::string_view> names,
                     std::string_view label) -> const nlohmann::json& {
    const auto* v = detail::find_key(obj, names);
    if (v == nullptr) throw UserError("TrainGML payload: missing key '" + std::string(label) + "'");
    return *v;
  };

  TrainGmlSpec spec;
  spec.name = detail::scalar_text(require(root, {"Name"}, "Name"), "Name");
  if (spec.name.empty()) throw UserError("TrainGML payload: 'Name' is empty");

  const auto& task = require(root, {"GML-Task", "Task"}, "GML-Task");
  if (!task.is_object()) throw UserError("TrainGML payload: 'GML-Task' must be an object");
  const auto* target = detail::find_key(task, {"TargetNode"});
  const auto* label = detail::find_key(task, {"NodeLabel", "NodeLable"});
  const auto* source = detail::find_key(task, {"SourceNode"});
  const auto* dest = detail::find_key(task, {"DestinationNode"});
  const auto* edge = detail::find_key(task, {"TargetEdge", "LinkPredicate"});

  if (const auto* tt = detail::find_key(task, {"TaskType"})) {
    const std::string name = detail::scalar_text(*tt, "TaskType");
    auto t = task_type_from_name(name);
    if (!t) throw UserError("TrainGML payload: unknown TaskType '" + name + "'");
    spec.task_type = *t;
  } else if (label != nullptr) {
    spec.task_type = TaskType::NodeClassifier;
  } else if (source != nullptr || dest != nullptr) {
    spec.task_type = TaskType::LinkPredictor;
  } else {
    throw UserError("TrainGML payload: missing key 'TaskType'");
  }

  switch (spec.task_type) {
    case TaskType::NodeClassifier:
      if (!target || !label) {
        throw UserError("TrainGML payload: NodeClassifier requires TargetNode and NodeLabel");
      }
      if (source || dest || edge) {
        throw UserError("TrainGML payload: NodeClassifier does not take SourceNode/DestinationNode");
      }
      spec.target_node_type = detail::resolve_iri(*target, "TargetNode", prefixes);
      spec.label_predicate = detail::resolve_iri(*label, "NodeLabel", prefixes);
      break;
    case TaskType::LinkPredictor:
      if (!source || !dest) {
        throw UserError("TrainGML payload: LinkPredictor requires SourceNode and DestinationNode");
      }
      if (label) throw UserError("TrainGML payload: LinkPredictor does not take NodeLabel");
      spec.source_node_type = detail::resolve_iri(*source, "SourceNode", prefixes);
      spec.destination_node_type = detail::resolve_iri(*dest, "DestinationNode", prefixes);
      spec.target_node_type = *spec.source_node_type;
      if (target && detail::resolve_iri(*target, "TargetNode", prefixes) != spec.target_node_type) {
        throw UserError("TrainGML payload: LinkPredictor TargetNode must equal SourceNode");
      }
      if (edge) spec.link_predicate = detail::resolve_iri(*edge, "TargetEdge", prefixes);
      break;
    case TaskType::NodeSimilarity:
      if (!target) throw UserError("TrainGML payload: NodeSimilarity requires TargetNode");
      if (label || source || dest || edge) {
        throw UserError("TrainGML payload: NodeSimilarity takes only TargetNode");
      }
      spec.target_node_type = detail::resolve_iri(*target, "TargetNode", prefixes);
      break;
  }

  const auto& budget = require(root, {"Task Budget", "Budget"}, "Task Budget");
  if (!budget.is_object()) throw UserError("TrainGML payload: 'Task Budget' must be an object");
  spec.budget.max_memory_bytes = parse_memory(require(budget, {"MaxMemory"}, "MaxMemory"));
  spec.budget.max_time_seconds = parse_duration(require(budget, {"MaxTime"}, "MaxTime"));
  if (const auto* p = detail::find_key(budget, {"Priority"})) spec.budget.priority = parse_priority(*p);

  for (const nlohmann::json* scope : {static_cast<const nlohmann::json*>(&root), &task}) {
    if (const auto* hp = detail::find_key(*scope, {"Hyperparameters", "HyperParams"})) {
      if (!hp->is_object()) throw UserError("TrainGML payload: hyperparameters must be an object");
      spec.hyperparams = *hp;
    }
    if (const auto* m = detail::find_key(*scope, {"Method", "GML-Method"})) {
      spec.method_override = detail::scalar_text(*m, "Method");
    }
    if (const auto* s = detail::find_key(*scope, {"Sampling"})) spec.sampling = parse_sampling(*s);
  }
  return spec;
}

/// Strict JSON form; parse_train_json(to_json(s).dump()) == s.
inline nlohmann::json to_json(const TrainGmlSpec& spec) {
  nlohmann::json task;
  task["TaskType"] = std::string(to_string(spec.task_type));
  switch (spec.task_type) {
    case TaskType::NodeClassifier:
      task["TargetNode"] = spec.target_node_type;
      task["NodeLabel"] = spec.label_predicate.value_or("");
      break;
    case TaskType::LinkPredictor:
      task["SourceNode"] = spec.source_node_type.value_or("");
      task["DestinationNode"] = spec.destination_node_type.value_or("");
      if (spec.link_predicate) task["TargetEdge"] = *spec.link_predicate;
      break;
    case TaskType::NodeSimilarity:
      task["TargetNode"] = spec.target_node_type;
      break;
  }
  nlohmann::json j;
  j["Name"] = spec.name;
  j["GML-Task"] = std::move(task);
  j["Task Budget"] = {{"MaxMemory", spec.budget.max_memory_bytes},
                      {"MaxTime", spec.budget.max_time_seconds},
                      {"Priority", std::string(to_string(spec.budget.priority))}};
  if (!spec.hyperparams.empty()) j["Hyperparameters"] = spec.hyperparams;
  if (spec.method_override) j["Method"] = *spec.method_override;
  if (spec.sampling) j["Sampling"] = {{"d", spec.sampling->d}, {"h", spec.sampling->h}};
  return j;
}

}  // namespace kgnet::sparqlml
