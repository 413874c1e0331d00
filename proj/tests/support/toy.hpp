#pragma once

// Shared fixtures: sample paths, scratch directories and the query texts
// used by the golden tests.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "kgnet/rdf/term.hpp"

#ifndef KGNET_SAMPLES_DIR
#error "KGNET_SAMPLES_DIR must point at the samples/ directory"
#endif

namespace toy {

using kgnet::rdf::Term;
using kgnet::rdf::Triple;

inline const std::string kDblp = "https://www.dblp.org/";

inline std::string sample(const std::string& name) { return std::string(KGNET_SAMPLES_DIR) + "/" + name; }

inline Term dblp(const std::string& local) { return Term::iri(kDblp + local); }
inline Term type() { return kgnet::rdf::rdf_type(); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "kgnet-test-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = buf.data();
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }
  std::string operator/(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

inline const char* const kFig2 = R"(prefix dblp: <https://www.dblp.org/>
prefix kgnet: <https://www.kgnet.com/>
select ?title ?venue
where {
?paper a dblp:Publication.
?paper dblp:title ?title.
?paper ?NodeClassifier ?venue.
?NodeClassifier a kgnet:NodeClassifier.
?NodeClassifier kgnet:TargetNode dblp:Publication.
?NodeClassifier kgnet:NodeLabel dblp:venue.}
)";

inline const char* const kFig7 = R"(prefix dblp:<https://www.dblp.org/>
prefix kgnet:<https://www.kgnet.com/>
Insert into <kgnet> { ?s ?p ?o }
where {select * from kgnet:TrainGML(
{Name: 'MAG_Paper-Venue_Classifer',
 GML-Task:{ TaskType: kgnet:NodeClassifier,
 TargetNode: dblp:publication,
 NodeLable: dblp:venue},
 Task Budget:{ MaxMemory:50GB, MaxTime:1h,
               Priority:ModelScore} })}
)";

inline const char* const kFig8 = R"(prefix dblp:<https://www.dblp.org/>
prefix kgnet:<https://www.kgnet.com/>
delete {?NodeClassifier ?p ?o}
where {
?NodeClassifier a kgnet:NodeClassifier.
?NodeClassifier kgnet:TargetNode dblp:Publication.
?NodeClassifier kgnet:NodeLabel dblp:venue.}
)";

inline const char* const kFig9 = R"(prefix dblp: <https://www.dblp.com/>
prefix kgnet: <https://www.kgnet.com/>
select ?author ?affiliation
where { ?author a dblp:person.
?author ?LinkPredictor ?affiliation.
?LinkPredictor a kgnet:LinkPredictor.
?LinkPredictor kgnet:SourceNode dblp:person.
?LinkPredictor kgnet:DestinationNode dblp:affiliation.
?LinkPredictor kgnet:TopK-Links 10.}
)";

}  // namespace toy
