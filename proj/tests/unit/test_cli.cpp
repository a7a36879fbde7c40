// Copyright 2026 The RRM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rrm/io.hpp"

namespace {

namespace fs = std::filesystem;

int run(const std::string& args, const fs::path& capture = {}) {
  std::string cmd = std::string(RRM_CLI_PATH) + " " + args;
  cmd += capture.empty() ? " >/dev/null 2>&1" : " >" + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(RRM_CLI_PATH).empty()) GTEST_SKIP() << "built without the rrm tool";
    dir_ = fs::temp_directory_path() / "rrm_cli_tests";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, SynthAuditPlotdata) {
  ASSERT_EQ(run("synth --n 200 --dim 4 --sep 3 --seed 1 --out " + p("d")), 0);
  ASSERT_TRUE(fs::exists(dir_ / "d" / "train.emb"));
  const std::string io = " --train " + p("d/train.emb") + " --test " + p("d/test.emb");
  ASSERT_EQ(run("audit" + io + " --trials 3 --out " + p("a.json"), p("a.txt")), 0);
  EXPECT_NE(slurp(dir_ / "a.txt").find("rrm_bound="), std::string::npos);
  ASSERT_EQ(run("audit" + io + " --trials 3 --trainer interpolator --out " + p("b.json")), 0);
  const auto report = rrm::read_report(dir_ / "a.json");
  EXPECT_EQ(report.trials, 3u);
  EXPECT_EQ(report.n_train, 200u);
  ASSERT_EQ(run("plotdata --reports " + p("a.json") + " " + p("b.json") + " --out " + p("plot.csv")), 0);
  std::istringstream csv(slurp(dir_ / "plot.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("synth --n 10"), 2);
  EXPECT_EQ(run("oracle --suite bogus"), 2);
  EXPECT_EQ(run("audit --train x"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST_F(Cli, RuntimeErrorsExitOne) {
  ASSERT_EQ(run("synth --n 50 --dim 2 --out " + p("d")), 0);
  const std::string io = " --train " + p("d/train.emb") + " --test " + p("d/test.emb");
  EXPECT_EQ(run("audit" + io + " --trials 1 --cpc on"), 1);
  std::vector<std::uint8_t> bytes = rrm::encode_embeddings(rrm::read_embeddings(dir_ / "d" / "train.emb"));
  bytes.resize(24);
  for (int i = 8; i < 12; ++i) bytes[static_cast<std::size_t>(i)] = 0;
  std::ofstream(dir_ / "empty.emb", std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  EXPECT_EQ(run("audit --train " + p("empty.emb") + " --test " + p("d/test.emb"), p("e.txt")), 1);
  EXPECT_NE(slurp(dir_ / "e.txt").find("n = 0"), std::string::npos);
  EXPECT_EQ(run("audit --train " + p("missing.emb") + " --test " + p("d/test.emb")), 1);
}

TEST_F(Cli, OracleAllPasses) {
  ASSERT_EQ(run("oracle --suite all --count 20", p("o.txt")), 0);
  EXPECT_NE(slurp(dir_ / "o.txt").find("result=PASS"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "o.txt").find("result=FAIL"), std::string::npos);
}

}  // namespace
