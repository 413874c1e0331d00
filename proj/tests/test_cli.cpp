#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "kgnet/util/zip.hpp"
#include "support/toy.hpp"

#ifndef KGNET_CLI_PATH
#error "KGNET_CLI_PATH must name the built kgnet binary"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args`; stdout is captured, stderr discarded.
Run run_cli(const toy::TempDir& ws, const std::string& args) {
  const std::string cmd = std::string(KGNET_CLI_PATH) + " --workspace " + ws.path() + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, LoadTrainQueryList) {
  toy::TempDir ws;
  ASSERT_EQ(run_cli(ws, "load " + toy::sample("toy_dblp.nt")).code, 0);
  const auto train = run_cli(ws, "train " + toy::sample("train_nc.json"));
  ASSERT_EQ(train.code, 0);
  EXPECT_NE(train.out.find("trained https://www.kgnet.com/model/NodeClassifier/"), std::string::npos);

  const auto q = run_cli(ws, "query --format csv " + toy::sample("paper_venue.sparqlml"));
  ASSERT_EQ(q.code, 0);
  EXPECT_TRUE(q.out.starts_with("title,venue"));
  EXPECT_GT(count_lines(q.out), 1u);

  const auto list = run_cli(ws, "models list");
  ASSERT_EQ(list.code, 0);
  EXPECT_EQ(count_lines(list.out), 2u);
  EXPECT_NE(list.out.find("\n1 model\n"), std::string::npos);
}

TEST(Cli, IncompleteGroupExitsWithOne) {
  toy::TempDir ws;
  kgnet::util::write_file(ws / "bad.sparqlml",
                   "prefix kgnet: <https://www.kgnet.com/>\n"
                   "select ?p ?v where { ?p ?NodeClassifier ?v . ?NodeClassifier a kgnet:NodeClassifier . }\n");
  EXPECT_EQ(run_cli(ws, "query " + (ws / "bad.sparqlml")).code, 1);
  EXPECT_EQ(run_cli(ws, "query " + (ws / "absent.sparqlml")).code, 2);
  EXPECT_EQ(run_cli(ws, "no-such-command").code, 1);
}
