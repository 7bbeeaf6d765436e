// Copyright 2026 The fkg Authors.
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

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fkg {
namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the fkg binary with `args`; stderr goes to stdout when `merge`.
Run fkg(const std::filesystem::path& data, const std::string& args, bool merge = false) {
  std::string cmd = std::string(FKG_CLI) + " --data-dir '" + data.string() + "' " + args +
                    (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::temp_dir("cli");
    data_ = dir_ / "data";
    ASSERT_EQ(fkg(data_, "ingest-ontology " + testing::fixture_path("ontology.csv")).status, 0);
    ASSERT_EQ(fkg(data_, "ingest-nutrition " + testing::fixture_path("nutrients.csv")).status, 0);
    ASSERT_EQ(fkg(data_, "ingest-recipes " + testing::fixture_path("recipes.json")).status, 0);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
  std::filesystem::path data_;
};

TEST_F(CliTest, QueryPrintsMatchingIds) {
  auto r = fkg(data_, "query 'has~(B1136) AND has~(B1631)'");
  ASSERT_EQ(r.status, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["ids"], nlohmann::json({"r01", "r02", "r03"}));

  auto g = fkg(data_, "query 'has~(B1136) AND has~(B1631)' --subgraph --format dot");
  EXPECT_EQ(g.status, 0);
  EXPECT_NE(g.out.find("digraph"), std::string::npos);
}

TEST_F(CliTest, NutritionProfile) {
  auto r = fkg(data_, "nutrition r02");
  ASSERT_EQ(r.status, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["basis"], "per_recipe");
  EXPECT_EQ(j["recipe_id"], "r02");
  EXPECT_EQ(j["amounts"].size(), 4u);
  auto s = nlohmann::json::parse(fkg(data_, "nutrition r02 --basis serving").out);
  EXPECT_DOUBLE_EQ(s["amounts"]["energy_kcal"].get<double>() * 4,
                   j["amounts"]["energy_kcal"].get<double>());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(fkg(data_, "frobnicate").status, 2);
  EXPECT_EQ(fkg(data_, "").status, 2);
  EXPECT_EQ(fkg(data_, "nutrition r01 --basis weekly").status, 2);

  auto missing = fkg(data_, "nutrition nope", true);
  EXPECT_EQ(missing.status, 1);
  auto err = nlohmann::json::parse(missing.out);
  EXPECT_EQ(err["code"], "unknown_recipe");
  EXPECT_EQ(err["status"], 404);

  auto syntax = fkg(data_, "query 'has(B1136'", true);
  EXPECT_EQ(syntax.status, 1);
  EXPECT_EQ(nlohmann::json::parse(syntax.out)["position"], 9);
}

TEST_F(CliTest, StateSurvivesAndExports) {
  auto state = fkg(data_, "export --state");
  ASSERT_EQ(state.status, 0);
  auto j = nlohmann::json::parse(state.out);
  EXPECT_EQ(j["recipes"].size(), 12u);
  EXPECT_EQ(j["seq"], 14);
  auto g = nlohmann::json::parse(fkg(data_, "export --ids r01,r02").out);
  std::size_t recipes = 0;
  for (const auto& n : g["nodes"]) recipes += n["type"] == "recipe";
  EXPECT_EQ(recipes, 2u);
}

TEST_F(CliTest, SuggestAndNearest) {
  ASSERT_EQ(fkg(data_, "ingest-recipes " + testing::fixture_path("suggest_corpus.json")).status, 0);
  auto s = fkg(data_, "suggest --train --title 'fried onion' --ingredients ONION -k 1");
  ASSERT_EQ(s.status, 0);
  EXPECT_EQ(nlohmann::json::parse(s.out)["suggestions"][0]["text"], "fry the onion");
  auto n = fkg(data_, "nearest --ingredients B1136-03,SCALLION -k 2");
  ASSERT_EQ(n.status, 0);
  EXPECT_EQ(nlohmann::json::parse(n.out)["hits"].size(), 2u);
}

TEST_F(CliTest, CorruptLogRefusesToStart) {
  {
    std::ofstream log(data_ / "journal.log", std::ios::binary | std::ios::app);
    log << "garbage line\n";
  }
  auto r = fkg(data_, "serve --port 1", true);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("log_corrupt"), std::string::npos);
  EXPECT_EQ(fkg(data_, "query 'has(EGG)'").status, 1);
}

}  // namespace
}  // namespace fkg
