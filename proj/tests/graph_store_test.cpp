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

#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fkg/error.hpp"
#include "fkg/graph_store.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace fkg {
namespace {

using testing::fixture_ontology;
using testing::fixture_recipes;
using testing::fixture_store;

Recipe two_ingredient_recipe() {
  Recipe r;
  r.id = "t1";
  r.title = "Milk toast";
  r.uses = {{"MILK", 100, Unit::kMilliliter, 103, 0, "heat"},
            {"FLOUR", 50, Unit::kGram, 50, 0, "heat"}};
  r.steps = {{"Heat the milk with flour.", "heat", {"MILK", "FLOUR"}}};
  return r;
}

TEST(GraphStore, UpsertIndexesEveryIngredientAndAncestor) {
  GraphStore store(fixture_ontology());
  EXPECT_EQ(store.upsert(two_ingredient_recipe()), "t1");
  EXPECT_EQ(store.recipes_containing("MILK", false), IdSet{"t1"});
  EXPECT_EQ(store.recipes_containing("FLOUR", false), IdSet{"t1"});
  EXPECT_EQ(store.recipes_containing("DAIRY", true), IdSet{"t1"});
  EXPECT_EQ(store.recipes_containing("FOOD", true), IdSet{"t1"});
  EXPECT_TRUE(store.recipes_containing("DAIRY", false).empty());
  EXPECT_TRUE(store.recipes_containing("MEAT", true).empty());
}

TEST(GraphStore, UnknownIngredientRejected) {
  GraphStore store(fixture_ontology());
  Recipe r = two_ingredient_recipe();
  r.uses[1].ingredient_id = "B9999";
  r.steps[0].ingredients = {"MILK", "B9999"};
  try {
    store.upsert(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownIngredient);
    EXPECT_EQ(e.field(), "uses[1].ingredient_id");
  }
  EXPECT_EQ(store.size(), 0u);
}

TEST(GraphStore, AbstractIngredientRejected) {
  GraphStore store(fixture_ontology());
  Recipe r = two_ingredient_recipe();
  r.uses[0].ingredient_id = "DAIRY";
  r.steps[0].ingredients = {"DAIRY", "FLOUR"};
  try {
    store.upsert(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidRecipe);
  }
}

TEST(GraphStore, StructuralInvariantsEnforced) {
  GraphStore store(fixture_ontology());
  auto expect_invalid = [&](Recipe r, const std::string& field) {
    try {
      store.upsert(r);
      ADD_FAILURE() << "accepted invalid recipe, field " << field;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidRecipe);
      EXPECT_EQ(e.field(), field);
    }
  };
  Recipe r = two_ingredient_recipe();
  r.servings = 0;
  expect_invalid(r, "servings");
  r = two_ingredient_recipe();
  r.uses.clear();
  r.steps[0].ingredients.clear();
  expect_invalid(r, "uses");
  r = two_ingredient_recipe();
  r.steps.clear();
  expect_invalid(r, "steps");
  r = two_ingredient_recipe();
  r.uses[1].grams = -1;
  expect_invalid(r, "uses[1].grams");
  r = two_ingredient_recipe();
  r.uses[0].step_index = 3;
  expect_invalid(r, "uses[0].step_index");
  r = two_ingredient_recipe();
  r.steps[0].ingredients.push_back("EGG");
  expect_invalid(r, "steps[0].ingredients[2]");
  r = two_ingredient_recipe();
  r.regions = {{"jp", RegionRelation::kOrigin}};
  expect_invalid(r, "regions[0].code");
}

TEST(GraphStore, ReupsertReplacesWithoutDuplicates) {
  GraphStore store(fixture_ontology());
  store.upsert(two_ingredient_recipe());
  Recipe r = two_ingredient_recipe();
  r.title = "Renamed";
  r.uses[1] = {"RICE", 50, Unit::kGram, 50, 0, "heat"};
  r.steps[0].ingredients = {"MILK", "RICE"};
  store.upsert(r);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.version("t1"), 2u);
  EXPECT_EQ(store.get("t1").title, "Renamed");
  EXPECT_TRUE(store.recipes_containing("FLOUR", false).empty());
  EXPECT_EQ(store.recipes_containing("RICE", false), IdSet{"t1"});
  EXPECT_EQ(store.recipes_containing("GRAIN", true), IdSet{"t1"});
}

TEST(GraphStore, EmptyIdGetsUuid) {
  GraphStore store(fixture_ontology());
  Recipe r = two_ingredient_recipe();
  r.id.clear();
  std::string id = store.upsert(r);
  ASSERT_EQ(id.size(), 36u);
  EXPECT_EQ(id[14], '4');
  EXPECT_TRUE(store.contains(id));
}

TEST(GraphStore, EraseRemovesFromIndices) {
  GraphStore store = fixture_store();
  store.erase("r01");
  EXPECT_FALSE(store.recipes_containing("B1136", true).count("r01"));
  EXPECT_FALSE(store.recipes_in_region("CN").count("r01"));
  EXPECT_THROW(store.erase("r01"), Error);
}

TEST(GraphStore, RegionIndex) {
  GraphStore store = fixture_store();
  EXPECT_EQ(store.recipes_in_region("CN"), (IdSet{"r01", "r06", "r12"}));
  EXPECT_EQ(store.recipes_in_region("JP", RegionRelation::kPopular), (IdSet{"r01", "r12"}));
  EXPECT_TRUE(store.recipes_in_region("JP", RegionRelation::kOrigin).empty());
}

TEST(GraphStore, RebindRevalidatesAgainstNewOntology) {
  GraphStore store = fixture_store();
  auto small = testing::small_ontology();
  EXPECT_THROW(store.rebind(small), Error);
  EXPECT_EQ(store.size(), 12u);  // untouched
  EXPECT_EQ(&store.ontology(), fixture_ontology().get());
}

TEST(GraphStore, SubgraphExport) {
  GraphStore store = fixture_store();
  Subgraph g = store.export_subgraph({"r02"}, {"B1136-01"});
  ASSERT_EQ(g.edges.size(), 4u);
  std::size_t marked = 0;
  for (const auto& n : g.nodes) marked += n.marked;
  EXPECT_EQ(marked, 1u);
  std::string dot = g.to_dot();
  EXPECT_NE(dot.find("digraph fkg"), std::string::npos);
  EXPECT_NE(dot.find("\"r02\" -> \"B1136-01\""), std::string::npos);
  EXPECT_NE(dot.find("marked=true"), std::string::npos);
  auto j = g.to_json();
  EXPECT_EQ(j["nodes"].size(), 5u);
}

// Index answers equal a scan over 1500 random recipes, including after
// overwrites and deletions.
TEST(GraphStoreProperty, IndexMatchesScan) {
  std::mt19937_64 rng(5);
  GraphStore store(fixture_ontology());
  auto pool = testing::concrete_ids(*fixture_ontology());
  for (int i = 0; i < 1500; ++i) {
    store.upsert(testing::random_recipe(rng, pool, "x" + std::to_string(i % 1200)));
  }
  for (int i = 0; i < 100; ++i) store.erase("x" + std::to_string(i * 7));
  auto parent = oracle::parent_map(*fixture_ontology());
  for (const auto& node : fixture_ontology()->nodes()) {
    for (bool expand : {false, true}) {
      IdSet scan;
      for (const auto& [id, e] : store.entries()) {
        for (const auto& u : e.recipe.uses) {
          if (expand ? oracle::under(parent, u.ingredient_id, node.id)
                     : u.ingredient_id == node.id) {
            scan.insert(id);
          }
        }
      }
      ASSERT_EQ(store.recipes_containing(node.id, expand), scan) << node.id << expand;
    }
  }
}

TEST(GraphStore, RecipeJsonRoundTrip) {
  for (const auto& r : fixture_recipes()) {
    Recipe back = recipe_from_json(to_json(r));
    EXPECT_EQ(back, r);
  }
}

}  // namespace
}  // namespace fkg
