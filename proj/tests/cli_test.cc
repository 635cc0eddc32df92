// Copyright 2026 The TENet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tenet/vocab.h"
#include "test_util.h"

namespace tenet {
namespace {

std::string cli(const testing::TempDir& dir, const std::string& args) {
  return "cd '" + dir.path().string() + "' && '" + TENET_CLI + "' " + args +
         " --log-level error";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, HelpAndUnknownCommand) {
  testing::TempDir dir;
  EXPECT_EQ(testing::run_command("'" + std::string(TENET_CLI) + "' --help > /dev/null").exit_code, 0);
  EXPECT_NE(testing::run_command(cli(dir, "frobnicate") + " 2> /dev/null").exit_code, 0);
}

TEST(Cli, VocabularyCommandsAgreeWithLibrary) {
  testing::TempDir dir;
  const std::vector<std::string> captions = {"A dog runs.", "The dog sleeps",
                                             "a cat and a dog"};
  {
    std::ofstream out(dir / "caps.txt");
    for (const auto& c : captions) out << c << "\n";
  }
  const auto stats = testing::run_command(cli(dir, "vocab stats --captions caps.txt"));
  ASSERT_EQ(stats.exit_code, 0);
  const auto table = count_corpus(captions);
  EXPECT_EQ(nlohmann::json::parse(stats.output), to_json(corpus_stats(table)));

  ASSERT_EQ(testing::run_command(cli(dir, "vocab build --captions caps.txt --min-count 1 "
                                          "--min-length 3 --vocab-size 4 --out v.tsv"))
                .exit_code,
            0);
  EXPECT_EQ(read_file(dir / "v.tsv"), build_vocabulary(table, 1, 3, 4).to_tsv());
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  testing::TempDir dir;
  EXPECT_EQ(testing::run_command(cli(dir, "show-config --fixture --top-c 200") + " 2> /dev/null")
                .exit_code,
            2);
  EXPECT_EQ(testing::run_command(cli(dir, "show-config --set bogus=1") + " 2> /dev/null")
                .exit_code,
            2);
  std::ofstream(dir / "bad.cfg") << "top_c = 3\ntop_c = 4\n";
  EXPECT_EQ(testing::run_command(cli(dir, "show-config --config bad.cfg") + " 2> /dev/null")
                .exit_code,
            2);
}

TEST(Cli, ShowConfigOverridesRoundTrip) {
  testing::TempDir dir;
  const auto r = testing::run_command(
      cli(dir, "show-config --fixture --num-epochs 7 --set top_w=4 --seeds 2,3"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("num_epochs = 7\n"), std::string::npos);
  EXPECT_NE(r.output.find("top_w = 4\n"), std::string::npos);
  EXPECT_NE(r.output.find("seeds = 2,3\n"), std::string::npos);
  std::ofstream(dir / "c.cfg") << r.output;
  EXPECT_EQ(testing::run_command(cli(dir, "show-config --config c.cfg")).output, r.output);
}

TEST(Cli, FixturePipeline) {
  testing::TempDir dir;
  const std::string common = "--fixture --num-epochs 2 --output-dir out";
  ASSERT_EQ(testing::run_command(cli(dir, "run-experiment " + common)).exit_code, 0);
  const auto results = nlohmann::json::parse(read_file(dir / "out/results.json"));
  ASSERT_EQ(results.size(), 1u);
  const double overall = results[0]["overall"].get<double>();

  ASSERT_EQ(testing::run_command(cli(dir, "evaluate " + common + " --out e.json")).exit_code, 0);
  const auto eval = nlohmann::json::parse(read_file(dir / "e.json"));
  EXPECT_DOUBLE_EQ(eval["mean_overall"].get<double>(), overall);

  const auto one = testing::run_command(
      cli(dir, "predict " + common + " --image out/fixture/val2017/000001000000.png"));
  ASSERT_EQ(one.exit_code, 0);
  const auto pred = nlohmann::json::parse(one.output);
  EXPECT_EQ(pred["classes"].size(), 3u);
  EXPECT_EQ(pred["words"].size(), 10u);

  ASSERT_EQ(testing::run_command(
                cli(dir, "report " + common + " --ids 1000000,1000001,77 --out rep"))
                .exit_code,
            0);
  const auto html = read_file(dir / "rep/index.html");
  EXPECT_NE(html.find("77"), std::string::npos);
}

TEST(Cli, ParallelSeedsMatchSequential) {
  testing::TempDir dir;
  const std::string common = "run-experiment --fixture --num-epochs 2 --seeds 0,1";
  ASSERT_EQ(testing::run_command(cli(dir, common + " --output-dir seq")).exit_code, 0);
  ASSERT_EQ(testing::run_command(cli(dir, common + " --parallel-seeds 2 --output-dir par"))
                .exit_code,
            0);
  const auto seq = read_file(dir / "seq/results.csv");
  EXPECT_EQ(std::count(seq.begin(), seq.end(), '\n'), 3);
  EXPECT_EQ(seq, read_file(dir / "par/results.csv"));
}

}  // namespace
}  // namespace tenet
