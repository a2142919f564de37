// Copyright 2026 The ropdl Authors
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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ropdl/experiments.hpp"
#include "ropdl/image_io.hpp"
#include "ropdl/matcsv.hpp"
#include "ropdl/parallel.hpp"
#include "ropdl_cli/cli.hpp"

namespace ropdl {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("ropdl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override {
    fs::remove_all(root_);
    set_thread_count(1);
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ropdl");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::ifstream in(entry.path(), std::ios::binary);
      files[entry.path().filename().string()] =
          std::string(std::istreambuf_iterator<char>(in), {});
    }
    return files;
  }

  // Runs the same command at 1 and 4 threads and returns both output sets.
  void expect_deterministic(const std::vector<std::string>& command) {
    std::map<std::string, std::string> first;
    for (const char* threads : {"1", "4"}) {
      const fs::path out = root_ / (std::string("t") + threads);
      fs::remove_all(out);
      std::vector<std::string> args = {"--threads", threads};
      args.insert(args.end(), command.begin(), command.end());
      args.insert(args.end(), {"--out", out.string()});
      ASSERT_EQ(run(args), cli::kOk) << err_.str();
      const auto files = snapshot(out);
      ASSERT_FALSE(files.empty());
      if (first.empty()) {
        first = files;
      } else {
        EXPECT_EQ(files, first);
      }
    }
  }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SynthBenchIsDeterministicAndWritesAllFiles) {
  expect_deterministic({"synth-bench", "--M", "4", "--K", "6", "--S", "1", "--N", "20",
                        "--trials", "2", "--max-iter", "30", "--baseline-max-iter", "5"});
  const auto files = snapshot(root_ / "t1");
  EXPECT_EQ(files.count("config.json"), 1u);
  EXPECT_EQ(files.count("results.jsonl"), 1u);
  EXPECT_EQ(files.count("summary.csv"), 1u);
  EXPECT_EQ(files.at("config.json").find("threads"), std::string::npos);
}

TEST_F(CliTest, TrainIsDeterministic) {
  const fs::path input = root_ / "y.csv";
  write_matcsv(input, gen_dictionary(5, 4, 1) * gen_coefficients(4, 30, 1, 2));
  for (const char* method : {"rop", "ksvd", "mod"}) {
    expect_deterministic({"train", "--input", input.string(), "--method", method, "--K", "4",
                          "--S", "1", "--max-iter", "40", "--baseline-max-iter", "5",
                          "--record-trace"});
    const auto files = snapshot(root_ / "t1");
    const Mat d = read_matcsv(root_ / "t1" / "D.csv");
    EXPECT_EQ(d.rows(), 5);
    EXPECT_EQ(d.cols(), 4);
    EXPECT_EQ(files.count("atoms.csv"), 1u);
  }
}

TEST_F(CliTest, SuperResolutionPipelineIsDeterministic) {
  expect_deterministic({"sr-train", "--K", "16", "--max-iter", "30"});
  const fs::path dict = root_ / "dict";
  fs::rename(root_ / "t1", dict);
  expect_deterministic({"sr-reconstruct", "--dict", dict.string()});
  const auto files = snapshot(root_ / "t1");
  EXPECT_EQ(files.count("reconstruction.pgm"), 1u);
  EXPECT_EQ(files.count("metrics.json"), 1u);
  const GrayImage rec = read_pgm(root_ / "t1" / "reconstruction.pgm");
  EXPECT_EQ(rec.height(), 28);

  EXPECT_EQ(run({"sr-reconstruct", "--dict", dict.string(), "--patch", "2", "--out",
                 (root_ / "bad").string()}),
            cli::kConfigError);
}

TEST_F(CliTest, MakeDigitsAndEval) {
  expect_deterministic({"make-digits", "--digits", "3,5"});
  fs::rename(root_ / "t1", root_ / "digits");
  const fs::path five = root_ / "digits" / "digit_5.pgm";
  const fs::path three = root_ / "digits" / "digit_3.pgm";
  ASSERT_EQ(run({"eval", "--estimate", five.string(), "--truth", five.string()}), cli::kOk);
  EXPECT_EQ(std::stod(out_.str()), 0.0);
  ASSERT_EQ(run({"eval", "--estimate", three.string(), "--truth", five.string()}), cli::kOk);
  const double e = std::stod(out_.str());
  EXPECT_NEAR(e, sr_error(read_pgm(three), read_pgm(five)), 1e-15);
  expect_deterministic({"eval", "--estimate", three.string(), "--truth", five.string()});
  EXPECT_EQ(run({"make-digits", "--digits", "12", "--out", (root_ / "x").string()}),
            cli::kConfigError);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"synth-bench", "--M", "4", "--S", "5", "--out", root_.string()}),
            cli::kConfigError);
  EXPECT_NE(err_.str().find("S=5"), std::string::npos);
  EXPECT_EQ(run({"synth-bench", "--methods", "svd", "--out", root_.string()}),
            cli::kConfigError);
  EXPECT_EQ(run({"synth-bench", "--bogus"}), cli::kConfigError);
  EXPECT_EQ(run({}), cli::kConfigError);
  EXPECT_EQ(run({"train", "--input", (root_ / "missing.csv").string(), "--out",
                 root_.string()}),
            cli::kIoError);

  std::ofstream(root_ / "bad.csv") << "2,2\n1,x\n3,4\n";
  EXPECT_EQ(run({"train", "--input", (root_ / "bad.csv").string(), "--out", root_.string()}),
            cli::kIoError);
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);

  std::ofstream(root_ / "zero.csv") << "2,2\n0,0\n0,0\n";
  EXPECT_EQ(run({"train", "--input", (root_ / "zero.csv").string(), "--K", "1", "--out",
                 root_.string()}),
            cli::kConfigError);
}

TEST_F(CliTest, HelpShowsDefaultsAndEnvironmentVariables) {
  EXPECT_EQ(run({"synth-bench", "--help"}), cli::kOk);
  const std::string help = out_.str();
  EXPECT_NE(help.find("--rho"), std::string::npos);
  EXPECT_NE(help.find("ROPDL_MAX_ITER"), std::string::npos);
  EXPECT_NE(help.find("500"), std::string::npos);
}

TEST_F(CliTest, EnvironmentSuppliesFlags) {
  setenv("ROPDL_TRIALS", "2", 1);
  const int code = run({"synth-bench", "--M", "4", "--K", "6", "--S", "1", "--N", "10",
                        "--methods", "mod", "--baseline-max-iter", "2", "--out",
                        root_.string()});
  unsetenv("ROPDL_TRIALS");
  ASSERT_EQ(code, cli::kOk) << err_.str();
  std::ifstream in(root_ / "results.jsonl");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 3);  // two trials and one summary
}

}  // namespace
}  // namespace ropdl
