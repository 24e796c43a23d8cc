// Copyright 2026 The FFPDG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the ffpdg binary as a subprocess.

#include <sys/wait.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ffpdg/dataset.h"
#include "oracles.h"

namespace ffpdg {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

Result Exec(const std::string& args) {
  const std::string cmd = std::string(FFPDG_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ffpdg_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::create_directories(dir_);
    const Dataset train = testing::BiasedDataset(2000, 0.6, 0.2, 1);
    const Dataset test = testing::BiasedDataset(800, 0.6, 0.2, 2);
    SaveCsv(train, Path("train.csv"));
    SaveCsv(test, Path("test.csv"));
    std::ofstream(Path("data.schema")) << FormatSchema(train.schema());
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string Common() const {
    return "--input " + Path("train.csv") + " --schema " + Path("data.schema");
  }

  fs::path dir_;
};

TEST_F(CliTest, EmptyArgsPrintUsage) {
  const Result r = Exec("");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("generate"), std::string::npos);
  EXPECT_NE(r.output.find("evaluate"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Exec("generate --bogus 1").code, 2);
  EXPECT_EQ(Exec("generate " + Common()).code, 2);  // --output missing
  EXPECT_EQ(Exec("frobnicate").code, 2);
}

TEST_F(CliTest, GenerateIsByteIdenticalForSeed) {
  const Result a = Exec("generate " + Common() + " --seed 3 --output " + Path("a.csv"));
  ASSERT_EQ(a.code, 0) << a.output;
  EXPECT_NE(a.output.find("generate_seconds="), std::string::npos);
  EXPECT_NE(a.output.find("rows=2000"), std::string::npos);
  const Result b = Exec("generate " + Common() + " --seed 3 --output " + Path("b.csv"));
  ASSERT_EQ(b.code, 0) << b.output;
  EXPECT_EQ(Slurp(Path("a.csv")), Slurp(Path("b.csv")));
  EXPECT_TRUE(fs::exists(Path("a.csv.model.txt")));
  EXPECT_TRUE(fs::exists(Path("a.csv.audit.txt")));
  const Result c = Exec("generate " + Common() + " --seed 4 --n-out 50 --output " + Path("c.csv"));
  ASSERT_EQ(c.code, 0) << c.output;
  EXPECT_NE(Slurp(Path("a.csv")), Slurp(Path("c.csv")));
  EXPECT_NE(c.output.find("rows=50"), std::string::npos);
}

TEST_F(CliTest, GenerateRuntimeErrorIsTagged) {
  const Result r = Exec("generate " + Common() + " --p 9 --output " + Path("x.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("error: steps 4-8"), std::string::npos) << r.output;
  const Result e = Exec("generate " + Common() + " --epsilon 0 --output " + Path("x.csv"));
  EXPECT_EQ(e.code, 1) << e.output;
}

TEST_F(CliTest, EvaluatePrintsExactlyTheFiveKeys) {
  ASSERT_EQ(Exec("generate " + Common() + " --output " + Path("s.csv")).code, 0);
  const Result r = Exec("evaluate " + Common() + " --test " + Path("test.csv") +
                     " --synthetic " + Path("s.csv") + " --report " + Path("r.txt"));
  ASSERT_EQ(r.code, 0) << r.output;
  std::istringstream lines(r.output);
  std::vector<std::string> keys;
  for (std::string line; std::getline(lines, line);) {
    keys.push_back(line.substr(0, line.find('=')));
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"aucroc_best", "deo", "dsp", "di_ratio", "lrd"}));
  EXPECT_NE(Slurp(Path("r.txt")).find("decision_tree"), std::string::npos);
}

TEST_F(CliTest, EvaluateMissingSyntheticNamesPath) {
  const std::string missing = Path("nowhere.csv");
  const Result r = Exec("evaluate " + Common() + " --test " + Path("test.csv") +
                     " --synthetic " + missing);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find(missing), std::string::npos) << r.output;
}

TEST_F(CliTest, EvaluateSchemaMismatchExitsOne) {
  std::ofstream(Path("other.csv")) << "a,b\n1,0\n";
  const Result r = Exec("evaluate " + Common() + " --test " + Path("test.csv") +
                     " --synthetic " + Path("other.csv"));
  EXPECT_EQ(r.code, 1) << r.output;
}

TEST_F(CliTest, InspectShowsFairRatesAndBudget) {
  ASSERT_EQ(Exec("generate " + Common() + " --output " + Path("s.csv")).code, 0);
  const Result r = Exec("inspect --input " + Path("s.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("dp_reported=eps_mu+eps_sigma=1 "), std::string::npos);
  EXPECT_NE(r.output.find("Lipschitz"), std::string::npos);
  const size_t at = r.output.find("rates_after");
  ASSERT_NE(at, std::string::npos);
  const size_t gap = r.output.find("gap=", at);
  ASSERT_NE(gap, std::string::npos);
  EXPECT_LE(std::stod(r.output.substr(gap + 4)), 0.03);
  EXPECT_EQ(Exec("inspect --input " + Path("missing.csv")).code, 1);
}

TEST_F(CliTest, BenchPrintsOneLinePerSize) {
  const Result r = Exec("bench " + Common() + " --min-rows 250 --repeats 1");
  ASSERT_EQ(r.code, 0) << r.output;
  int sizes = 0;
  std::istringstream lines(r.output);
  for (std::string line; std::getline(lines, line);) {
    const size_t first = line.find_first_not_of(' ');
    if (first != std::string::npos &&
        std::isdigit(static_cast<unsigned char>(line[first]))) {
      ++sizes;
    }
  }
  EXPECT_EQ(sizes, 4);  // 250, 500, 1000, 2000
  EXPECT_NE(r.output.find("growth_exponent="), std::string::npos);
}

}  // namespace
}  // namespace ffpdg
