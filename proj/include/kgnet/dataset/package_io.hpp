#pragma once

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgnet/dataset/package.hpp"
#include "kgnet/error.hpp"
#include "kgnet/rdf/ntriples.hpp"
#include "kgnet/util/hash.hpp"
#include "kgnet/util/zip.hpp"

namespace kgnet::dataset {

namespace csv {

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// RFC 4180 rows; the header row is included.
inline std::vector<std::vector<std::string>> parse(std::string_view text, const std::string& file) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError(file + ": unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace csv

namespace detail {

inline NodeId parse_id(const std::string& s, const std::string& file) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || v > 0xFFFFFFFFull) throw std::out_of_range(s);
    return static_cast<NodeId>(v);
  } catch (const std::exception&) {
    throw IoError(file + ": bad id '" + s + "'");
  }
}

inline std::vector<std::vector<std::string>> body(const std::map<std::string, std::string>& files,
                                                  const std::string& path, std::size_t columns) {
  auto it = files.find(path);
  if (it == files.end()) throw IoError("dataset: missing file " + path);
  auto rows = csv::parse(it->second, path);
  if (rows.empty()) throw IoError(path + ": missing header row");
  rows.erase(rows.begin());
  for (const auto& r : rows) {
    if (r.size() != columns) {
      throw IoError(path + ": expected " + std::to_string(columns) + " columns, got " + std::to_string(r.size()));
    }
  }
  return rows;
}

inline std::string ids_csv(const std::vector<NodeId>& ids) {
  std::string out = "id\n";
  for (NodeId i : ids) out += std::to_string(i) + "\n";
  return out;
}

}  // namespace detail

/// On-disk layout: manifest.json, stats.json, nodes/<T>.csv (id,iri),
/// relations/<E>.csv (src_type,src_id,dst_type,dst_id), labels.csv,
/// label_dict.csv, split/{train,valid,test}.csv. The manifest records the
/// sha256 of every other file.
inline std::map<std::string, std::string> encode_files(const DatasetPackage& pkg) {
  std::map<std::string, std::string> files;
  nlohmann::json node_types = nlohmann::json::object(), edge_types = nlohmann::json::object();
  for (const auto& t : pkg.node_tables) {
    std::string s = "id,iri\n";
    for (NodeId i = 0; i < t.nodes.size(); ++i) s += std::to_string(i) + "," + csv::quote(t.nodes[i].to_string()) + "\n";
    files["nodes/" + t.name + ".csv"] = std::move(s);
    node_types[t.name] = t.type_iri;
  }
  for (const auto& r : pkg.relations) {
    std::string s = "src_type,src_id,dst_type,dst_id\n";
    for (const auto& e : r.edges) {
      s += e.src_type + "," + std::to_string(e.src_id) + "," + e.dst_type + "," + std::to_string(e.dst_id) + "\n";
    }
    files["relations/" + r.name + ".csv"] = std::move(s);
    edge_types[r.name] = r.predicate;
  }
  std::string labels = pkg.label_kind == LabelKind::Link ? "src_id,dst_id\n" : "node_id,label_id\n";
  for (const auto& l : pkg.labels) labels += std::to_string(l.target_id) + "," + std::to_string(l.label_id) + "\n";
  files["labels.csv"] = std::move(labels);
  std::string dict = "label_id,term\n";
  for (NodeId i = 0; i < pkg.label_dict.size(); ++i) dict += std::to_string(i) + "," + csv::quote(pkg.label_dict[i].to_string()) + "\n";
  files["label_dict.csv"] = std::move(dict);
  files["split/train.csv"] = detail::ids_csv(pkg.splits.train);
  files["split/valid.csv"] = detail::ids_csv(pkg.splits.valid);
  files["split/test.csv"] = detail::ids_csv(pkg.splits.test);
  files["stats.json"] = to_json(pkg.stats).dump(2) + "\n";

  nlohmann::json sums = nlohmann::json::object();
  for (const auto& [path, data] : files) sums[path] = util::sha256_hex(data);
  nlohmann::json multi = nlohmann::json::array();
  for (const auto& m : pkg.multi_typed) multi.push_back({{"node", m.node}, {"types", m.types}, {"chosen", m.chosen}});
  const auto& si = pkg.split_info;
  nlohmann::json manifest = {
      {"version", pkg.version},
      {"task", pkg.task},
      {"kg_digest", pkg.kg_digest},
      {"label_kind", to_string(pkg.label_kind)},
      {"target_table", pkg.target_table},
      {"destination_table", pkg.destination_table},
      {"node_types", node_types},
      {"edge_types", edge_types},
      {"split", {{"strategy", si.strategy},
                 {"ratios", {si.train, si.valid, si.test}},
                 {"seed", si.seed},
                 {"community_edge_type", si.community_edge_type ? nlohmann::json(*si.community_edge_type)
                                                                : nlohmann::json(nullptr)}}},
      {"multi_typed", multi},
      {"warnings", pkg.warnings},
      {"files", sums}};
  files["manifest.json"] = manifest.dump(2) + "\n";
  return files;
}

inline DatasetPackage decode_files(const std::map<std::string, std::string>& files) {
  auto mit = files.find("manifest.json");
  if (mit == files.end()) throw IoError("dataset: missing manifest.json");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(mit->second);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("dataset: malformed manifest.json: ") + e.what());
  }
  try {
    DatasetPackage pkg;
    pkg.version = m.at("version").get<int>();
    if (pkg.version != DatasetPackage::kFormatVersion) {
      throw IoError("dataset: format version " + std::to_string(pkg.version) + " is not supported (expected " +
                    std::to_string(DatasetPackage::kFormatVersion) + ")");
    }
    for (const auto& [path, sum] : m.at("files").items()) {
      auto it = files.find(path);
      if (it == files.end()) throw IoError("dataset: missing file " + path);
      if (util::sha256_hex(it->second) != sum.get<std::string>()) throw IoError("dataset: checksum mismatch in " + path);
    }
    pkg.task = m.at("task");
    pkg.kg_digest = m.at("kg_digest").get<std::string>();
    pkg.label_kind = label_kind_from(m.at("label_kind").get<std::string>());
    pkg.target_table = m.at("target_table").get<std::string>();
    pkg.destination_table = m.at("destination_table").get<std::string>();
    const auto& sp = m.at("split");
    pkg.split_info.strategy = sp.at("strategy").get<std::string>();
    pkg.split_info.train = sp.at("ratios").at(0).get<double>();
    pkg.split_info.valid = sp.at("ratios").at(1).get<double>();
    pkg.split_info.test = sp.at("ratios").at(2).get<double>();
    pkg.split_info.seed = sp.at("seed").get<std::uint64_t>();
    if (!sp.at("community_edge_type").is_null()) {
      pkg.split_info.community_edge_type = sp.at("community_edge_type").get<std::string>();
    }
    for (const auto& x : m.at("multi_typed")) {
      pkg.multi_typed.push_back(
          {x.at("node").get<std::string>(), x.at("types").get<std::vector<std::string>>(), x.at("chosen").get<std::string>()});
    }
    pkg.warnings = m.at("warnings").get<std::vector<std::string>>();

    for (const auto& [name, iri] : m.at("node_types").items()) {
      NodeTable t{name, iri.get<std::string>(), {}};
      const std::string path = "nodes/" + name + ".csv";
      for (const auto& r : detail::body(files, path, 2)) {
        if (detail::parse_id(r[0], path) != t.nodes.size()) throw IoError(path + ": ids are not contiguous");
        t.nodes.push_back(rdf::parse_ntriples_term(r[1]));
      }
      pkg.node_tables.push_back(std::move(t));
    }
    for (const auto& [name, pred] : m.at("edge_types").items()) {
      EdgeTable e{name, pred.get<std::string>(), {}};
      const std::string path = "relations/" + name + ".csv";
      for (const auto& r : detail::body(files, path, 4)) {
        e.edges.push_back({r[0], detail::parse_id(r[1], path), r[2], detail::parse_id(r[3], path)});
      }
      pkg.relations.push_back(std::move(e));
    }
    for (const auto& r : detail::body(files, "labels.csv", 2)) {
      pkg.labels.push_back({detail::parse_id(r[0], "labels.csv"), detail::parse_id(r[1], "labels.csv")});
    }
    for (const auto& r : detail::body(files, "label_dict.csv", 2)) {
      pkg.label_dict.push_back(rdf::parse_ntriples_term(r[1]));
    }
    auto split = [&](const std::string& path) {
      std::vector<NodeId> ids;
      for (const auto& r : detail::body(files, path, 1)) ids.push_back(detail::parse_id(r[0], path));
      return ids;
    };
    pkg.splits = {split("split/train.csv"), split("split/valid.csv"), split("split/test.csv")};
    auto sit = files.find("stats.json");
    if (sit == files.end()) throw IoError("dataset: missing stats.json");
    pkg.stats = stats_from_json(nlohmann::json::parse(sit->second));
    (void)decode_triples(pkg);  // every edge must resolve
    return pkg;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("dataset: malformed manifest: ") + e.what());
  } catch (const rdf::NTriplesError& e) {
    throw IoError(std::string("dataset: bad term: ") + e.what());
  }
}

/// Writes to `path` as a zip archive when it ends in ".zip", else as a directory.
inline void write_package(const DatasetPackage& pkg, const std::string& path) {
  namespace fs = std::filesystem;
  const auto files = encode_files(pkg);
  if (path.ends_with(".zip")) {
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    util::write_file(path, util::zip::write(files));
    return;
  }
  fs::create_directories(path);
  for (const auto& [rel, data] : files) {
    const fs::path p = fs::path(path) / rel;
    fs::create_directories(p.parent_path());
    util::write_file(p.string(), data);
  }
}

inline DatasetPackage read_package(const std::string& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("dataset not found: " + path);
  if (!fs::is_directory(path)) return decode_files(util::zip::read(util::read_file(path)));
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), path).generic_string()] = util::read_file(entry.path().string());
  }
  return decode_files(files);
}

}  // namespace kgnet::dataset
