#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kgnet/error.hpp"
#include "kgnet/rdf/backend.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/rdf/term.hpp"
#include "kgnet/sparqlml/ast.hpp"
#include "kgnet/util/hash.hpp"

namespace kgnet::kgmeta {

using sparqlml::ConstraintKey;
using sparqlml::TaskType;

/// One trained model as recorded in KGMeta.
struct ModelMetadata {
  std::string model_uri;
  TaskType task_type = TaskType::NodeClassifier;
  std::string target_node_type;
  std::optional<std::string> label_predicate;
  std::optional<std::string> source_node_type;
  std::optional<std::string> destination_node_type;
  std::string method_name;
  double accuracy = 0.0;           // NC: test accuracy; LP: Hits@10
  double inference_time_ms = 0.0;  // mean per call
  std::uint64_t model_cardinality = 0;
  std::string trained_on;
  int sampling_d = 1;
  int sampling_h = 1;
  std::string artifact_ref;
  std::string created_at;
  std::string dataset_digest;
  std::string name;

  bool operator==(const ModelMetadata&) const = default;
};

namespace vocab {
inline rdf::Term term(std::string_view local) { return rdf::kgnet_term(local); }
inline const char* const kAccuracy = "accuracy";
inline const char* const kInferenceTimeMs = "inferenceTimeMs";
inline const char* const kModelCardinality = "modelCardinality";
inline const char* const kGmlMethod = "gmlMethod";
inline const char* const kTrainedOnKG = "trainedOnKG";
inline const char* const kSamplingDirection = "samplingDirection";
inline const char* const kSamplingHops = "samplingHops";
inline const char* const kArtifactRef = "artifactRef";
inline const char* const kCreatedAt = "createdAt";
inline const char* const kDatasetDigest = "datasetDigest";
inline const char* const kModelName = "modelName";
}  // namespace vocab

class DuplicateModel : public UserError {
 public:
  explicit DuplicateModel(std::string existing)
      : UserError("an identical model is already registered: <" + existing + ">"),
        existing_(std::move(existing)) {}
  const std::string& existing_uri() const noexcept { return existing_; }

 private:
  std::string existing_;
};

/// Removes trained artifacts and embeddings. Must be all-or-nothing: on any
/// failure it throws and leaves every artifact in place.
class ArtifactRemover {
 public:
  virtual ~ArtifactRemover() = default;
  virtual void delete_artifacts(const std::vector<std::string>& refs) = 0;
};

inline void check_complete(const ModelMetadata& m) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw UserError(std::string("model metadata lacks ") + what);
  };
  need(rdf::is_absolute_iri(m.target_node_type), "an absolute target node type");
  need(!m.method_name.empty(), "a method name");
  need(!m.artifact_ref.empty(), "an artifact reference");
  need(rdf::is_absolute_iri(m.trained_on), "an absolute trainedOnKG IRI");
  need(m.accuracy >= 0.0 && m.accuracy <= 1.0, "an accuracy in [0,1]");
  need(m.inference_time_ms > 0.0, "a positive inference time");
  need((m.sampling_d == 1 || m.sampling_d == 2) && (m.sampling_h == 1 || m.sampling_h == 2),
       "a sampling scope with d,h in {1,2}");
  switch (m.task_type) {
    case TaskType::NodeClassifier:
      need(m.label_predicate && rdf::is_absolute_iri(*m.label_predicate), "a label predicate");
      break;
    case TaskType::LinkPredictor:
      need(m.source_node_type && rdf::is_absolute_iri(*m.source_node_type), "a source node type");
      need(m.destination_node_type && rdf::is_absolute_iri(*m.destination_node_type),
           "a destination node type");
      break;
    case TaskType::NodeSimilarity: break;
  }
}

/// `https://www.kgnet.com/model/<task>/<16 hex>` from the model's identity.
inline std::string mint_model_uri(const ModelMetadata& m) {
  util::Sha256 h;
  const char sep = '\x1f';
  h.update(sparqlml::to_string(m.task_type)).update({&sep, 1});
  for (const std::string* s : {&m.target_node_type, &m.method_name, &m.dataset_digest}) {
    h.update(*s).update({&sep, 1});
  }
  for (const auto* o : {&m.label_predicate, &m.source_node_type, &m.destination_node_type}) {
    h.update(o->value_or("")).update({&sep, 1});
  }
  h.update(std::to_string(m.sampling_d)).update({&sep, 1}).update(std::to_string(m.sampling_h));
  return std::string(rdf::vocab::kKgnet) + "model/" + std::string(sparqlml::to_string(m.task_type)) +
         "/" + h.hex().substr(0, 16);
}

/// RDF encoding of a model: one rdf:type triple plus one triple per field.
inline std::vector<rdf::Triple> to_triples(const ModelMetadata& m) {
  using rdf::Term;
  const Term s = Term::iri(m.model_uri);
  const std::string xsd_double(rdf::vocab::kXsdDouble);
  std::vector<rdf::Triple> out{
      {s, rdf::rdf_type(), sparqlml::task_class(m.task_type)},
      {s, sparqlml::constraint_predicate(ConstraintKey::TargetNode), Term::iri(m.target_node_type)},
  };
  if (m.label_predicate) {
    out.push_back({s, sparqlml::constraint_predicate(ConstraintKey::NodeLabel),
                   Term::iri(*m.label_predicate)});
  }
  if (m.source_node_type) {
    out.push_back({s, sparqlml::constraint_predicate(ConstraintKey::SourceNode),
                   Term::iri(*m.source_node_type)});
  }
  if (m.destination_node_type) {
    out.push_back({s, sparqlml::constraint_predicate(ConstraintKey::DestinationNode),
                   Term::iri(*m.destination_node_type)});
  }
  out.push_back({s, vocab::term(vocab::kGmlMethod), Term::literal(m.method_name)});
  out.push_back({s, vocab::term(vocab::kAccuracy), Term::literal(util::format_double(m.accuracy), xsd_double)});
  out.push_back({s, vocab::term(vocab::kInferenceTimeMs),
                 Term::literal(util::format_double(m.inference_time_ms), xsd_double)});
  out.push_back({s, vocab::term(vocab::kModelCardinality),
                 Term::integer(static_cast<long long>(m.model_cardinality))});
  out.push_back({s, vocab::term(vocab::kTrainedOnKG), Term::iri(m.trained_on)});
  out.push_back({s, vocab::term(vocab::kSamplingDirection), Term::integer(m.sampling_d)});
  out.push_back({s, vocab::term(vocab::kSamplingHops), Term::integer(m.sampling_h)});
  out.push_back({s, vocab::term(vocab::kArtifactRef), Term::literal(m.artifact_ref)});
  out.push_back({s, vocab::term(vocab::kCreatedAt),
                 Term::literal(m.created_at, std::string(rdf::vocab::kXsdDateTime))});
  out.push_back({s, vocab::term(vocab::kDatasetDigest), Term::literal(m.dataset_digest)});
  out.push_back({s, vocab::term(vocab::kModelName), Term::literal(m.name)});
  return out;
}

/// Inverse of to_triples over the (predicate, object) pairs of one model.
inline ModelMetadata from_properties(const std::string& uri,
                                     const std::vector<std::pair<rdf::Term, rdf::Term>>& props) {
  ModelMetadata m;
  m.model_uri = uri;
  bool typed = false;
  const std::string ns(rdf::vocab::kKgnet);
  auto number = [&](const rdf::Term& o, const char* what) {
    if (!o.is_literal()) throw BackendError(std::string("KGMeta: ") + what + " is not a literal");
    try {
      return std::stod(o.value());
    } catch (const std::exception&) {
      throw BackendError("KGMeta: bad " + std::string(what) + " '" + o.value() + "' on <" + uri + ">");
    }
  };
  for (const auto& [p, o] : props) {
    if (p == rdf::rdf_type()) {
      if (!sparqlml::in_kgnet_namespace(o)) continue;
      if (auto t = sparqlml::task_type_from_name(o.value())) {
        m.task_type = *t;
        typed = true;
      }
      continue;
    }
    if (!p.is_iri() || !p.value().starts_with(ns)) continue;
    const std::string local = p.value().substr(ns.size());
    if (local == "TargetNode") m.target_node_type = o.value();
    else if (local == "NodeLabel") m.label_predicate = o.value();
    else if (local == "SourceNode") m.source_node_type = o.value();
    else if (local == "DestinationNode") m.destination_node_type = o.value();
    else if (local == vocab::kGmlMethod) m.method_name = o.value();
    else if (local == vocab::kAccuracy) m.accuracy = number(o, "accuracy");
    else if (local == vocab::kInferenceTimeMs) m.inference_time_ms = number(o, "inferenceTimeMs");
    else if (local == vocab::kModelCardinality) {
      m.model_cardinality = static_cast<std::uint64_t>(std::stoull(o.value()));
    } else if (local == vocab::kTrainedOnKG) m.trained_on = o.value();
    else if (local == vocab::kSamplingDirection) m.sampling_d = std::stoi(o.value());
    else if (local == vocab::kSamplingHops) m.sampling_h = std::stoi(o.value());
    else if (local == vocab::kArtifactRef) m.artifact_ref = o.value();
    else if (local == vocab::kCreatedAt) m.created_at = o.value();
    else if (local == vocab::kDatasetDigest) m.dataset_digest = o.value();
    else if (local == vocab::kModelName) m.name = o.value();
  }
  if (!typed) throw BackendError("KGMeta: <" + uri + "> has no kgnet task type");
  return m;
}

/// Stateless manager of the KGMeta named graph on any SPARQL backend. Every
/// answer is derived from the graph's triples; writes are serialized.
class Governor {
 public:
  explicit Governor(rdf::SparqlBackend& backend, std::string graph = "kgnet")
      : backend_(backend), graph_(std::move(graph)) {}

  const std::string& graph() const { return graph_; }

  /// Inserts `meta` and returns its URI (minted when empty).
  std::string register_model(ModelMetadata meta) {
    check_complete(meta);
    if (meta.created_at.empty()) meta.created_at = util::utc_timestamp();
    if (meta.model_uri.empty()) meta.model_uri = mint_model_uri(meta);
    std::lock_guard lock(write_mutex_);
    std::map<ConstraintKey, rdf::Term> key{
        {ConstraintKey::TargetNode, rdf::Term::iri(meta.target_node_type)}};
    if (meta.label_predicate) key.emplace(ConstraintKey::NodeLabel, rdf::Term::iri(*meta.label_predicate));
    if (meta.source_node_type) key.emplace(ConstraintKey::SourceNode, rdf::Term::iri(*meta.source_node_type));
    if (meta.destination_node_type) {
      key.emplace(ConstraintKey::DestinationNode, rdf::Term::iri(*meta.destination_node_type));
    }
    for (const auto& existing : lookup_models(meta.task_type, key)) {
      const bool same_identity = existing.method_name == meta.method_name &&
                                 existing.sampling_d == meta.sampling_d &&
                                 existing.sampling_h == meta.sampling_h &&
                                 existing.label_predicate == meta.label_predicate &&
                                 existing.source_node_type == meta.source_node_type &&
                                 existing.destination_node_type == meta.destination_node_type;
      if (same_identity || existing.model_uri == meta.model_uri) {
        throw DuplicateModel(existing.model_uri);
      }
    }
    if (model_exists(meta.model_uri)) throw DuplicateModel(meta.model_uri);
    backend_.update(insert_data(to_triples(meta)));
    return meta.model_uri;
  }

  /// Models of `task` satisfying every constraint, ordered by URI. TopK is a
  /// query-time parameter and does not filter.
  std::vector<ModelMetadata> lookup_models(TaskType task,
                                           const std::map<ConstraintKey, rdf::Term>& constraints) const {
    std::string q = "SELECT DISTINCT ?m FROM " + graph_ref() + " WHERE { ?m <" +
                    std::string(rdf::vocab::kRdfType) + "> " + sparqlml::task_class(task).to_string() +
                    " .";
    for (const auto& [k, v] : constraints) {
      if (k == ConstraintKey::TopK) continue;
      q += " ?m " + sparqlml::constraint_predicate(k).to_string() + " " + v.to_string() + " .";
    }
    q += " }";
    std::vector<ModelMetadata> out;
    for (const auto& uri : column_iris(backend_.select(q), "m")) out.push_back(fetch(uri));
    return out;
  }

  std::vector<ModelMetadata> list_models() const {
    const std::string q = "SELECT DISTINCT ?m FROM " + graph_ref() + " WHERE { ?m <" +
                          std::string(rdf::vocab::kRdfType) + "> ?t . ?m " +
                          vocab::term(vocab::kArtifactRef).to_string() + " ?r . }";
    std::vector<ModelMetadata> out;
    for (const auto& uri : column_iris(backend_.select(q), "m")) out.push_back(fetch(uri));
    return out;
  }

  std::optional<ModelMetadata> find(const std::string& uri) const {
    if (!model_exists(uri)) return std::nullopt;
    return fetch(uri);
  }

  /// Removes every matching model. Artifacts go first through `remover`; the
  /// KGMeta triples are removed only when that succeeds.
  std::vector<std::string> delete_models(TaskType task,
                                         const std::map<ConstraintKey, rdf::Term>& constraints,
                                         ArtifactRemover& remover) {
    std::lock_guard lock(write_mutex_);
    const auto models = lookup_models(task, constraints);
    if (models.empty()) return {};
    std::vector<std::string> refs;
    for (const auto& m : models) refs.push_back(m.artifact_ref);
    remover.delete_artifacts(refs);
    std::vector<std::string> uris;
    for (const auto& m : models) {
      backend_.update("DELETE WHERE { GRAPH " + graph_ref() + " { <" + m.model_uri + "> ?p ?o } }");
      uris.push_back(m.model_uri);
    }
    return uris;
  }

  /// Removes the models with the given URIs, artifacts first. Unknown URIs
  /// raise NotFoundError before anything is removed.
  std::vector<std::string> delete_by_uri(const std::vector<std::string>& uris, ArtifactRemover& remover) {
    std::lock_guard lock(write_mutex_);
    std::vector<std::string> refs;
    for (const auto& uri : uris) {
      if (!model_exists(uri)) throw NotFoundError("no model <" + uri + "> in KGMeta");
      refs.push_back(fetch(uri).artifact_ref);
    }
    if (uris.empty()) return {};
    remover.delete_artifacts(refs);
    for (const auto& uri : uris) {
      backend_.update("DELETE WHERE { GRAPH " + graph_ref() + " { <" + uri + "> ?p ?o } }");
    }
    return uris;
  }

  /// KGMeta as canonical N-Triples (sorted lines).
  std::string export_ntriples() const {
    auto triples = backend_.construct("CONSTRUCT { ?s ?p ?o } FROM " + graph_ref() +
                                      " WHERE { ?s ?p ?o }");
    std::sort(triples.begin(), triples.end());
    return rdf::serialize_ntriples(triples);
  }

  /// Adds the triples of an export; returns the number of triples sent.
  std::size_t import_ntriples(std::string_view text) {
    auto triples = rdf::parse_ntriples(text);
    if (triples.empty()) return 0;
    std::lock_guard lock(write_mutex_);
    backend_.update(insert_data(triples));
    return triples.size();
  }

 private:
  std::string graph_ref() const { return "<" + graph_ + ">"; }

  std::string insert_data(const std::vector<rdf::Triple>& triples) const {
    std::string u = "INSERT DATA { GRAPH " + graph_ref() + " {\n";
    for (const auto& t : triples) u += rdf::to_ntriples_line(t);
    return u + "} }";
  }

  static std::vector<std::string> column_iris(const rdf::BindingTable& t, const std::string& var) {
    std::vector<std::string> out;
    const auto col = t.column(var);
    if (!col) return out;
    for (const auto& row : t.rows) {
      if (row[*col] && row[*col]->is_iri()) out.push_back(row[*col]->value());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool model_exists(const std::string& uri) const {
    auto t = backend_.select("SELECT ?p FROM " + graph_ref() + " WHERE { <" + uri + "> ?p ?o } LIMIT 1");
    return !t.empty();
  }

  ModelMetadata fetch(const std::string& uri) const {
    auto t = backend_.select("SELECT ?p ?o FROM " + graph_ref() + " WHERE { <" + uri + "> ?p ?o }");
    const auto pc = t.require_column("p"), oc = t.require_column("o");
    std::vector<std::pair<rdf::Term, rdf::Term>> props;
    for (const auto& row : t.rows) {
      if (row[pc] && row[oc]) props.emplace_back(*row[pc], *row[oc]);
    }
    return from_properties(uri, props);
  }

  rdf::SparqlBackend& backend_;
  std::string graph_;
  std::mutex write_mutex_;
};

}  // namespace kgnet::kgmeta
