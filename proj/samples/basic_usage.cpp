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

// Builds a tiny graph in memory, runs a class-level query, derives nutrition
// and records one revision.

#include <iostream>
#include <memory>

#include "fkg/graph_store.hpp"
#include "fkg/nutrition.hpp"
#include "fkg/ontology.hpp"
#include "fkg/query.hpp"
#include "fkg/revisions.hpp"

int main() {
  auto onto = std::make_shared<const fkg::Ontology>(fkg::Ontology::parse_csv(
      "id,name,parent_id,kind,synonyms,density\n"
      "food,food,,abstract,,\n"
      "dairy,dairy,food,abstract,,1.03\n"
      "milk,milk,dairy,concrete,whole milk,\n"
      "yogurt,yogurt,dairy,concrete,,\n"
      "fruit,fruit,food,abstract,,\n"
      "banana,banana,fruit,concrete,,\n"));
  auto table = fkg::NutrientTable::parse_csv(
      "ingredient_id,energy_kcal,protein_g\nmilk,61,3.2\nyogurt,61,3.5\nbanana,89,1.1\n", *onto);

  fkg::GraphStore store(onto);
  auto smoothie = fkg::recipe_from_json(nlohmann::json::parse(R"({
    "id": "smoothie", "title": "Banana smoothie", "servings": 2,
    "uses": [
      {"ingredient_id": "milk", "quantity": 1, "unit": "cup", "grams": 247.2},
      {"ingredient_id": "banana", "quantity": 120, "unit": "gram", "grams": 120}
    ],
    "steps": [{"text": "Blend everything.", "process": "blend",
               "ingredients": ["milk", "banana"]}]
  })"));
  store.upsert(smoothie);

  auto ast = fkg::parse_query("has~(dairy) AND energy_kcal@serving <= 300");
  auto result = fkg::evaluate(ast, store, table);
  std::cout << "query: " << fkg::render_query(ast) << "\n";
  for (const auto& id : result.ids) std::cout << "  match " << id << "\n";

  auto profile = fkg::per_serving(fkg::derive_recipe_profile(smoothie, table), smoothie.servings);
  std::cout << "energy per serving: " << profile.amounts.at("energy_kcal") << " kcal\n";

  fkg::RevisionLog log;
  fkg::Recipe edited = smoothie;
  edited.uses[0].ingredient_id = "yogurt";
  edited.steps[0].ingredients[0] = "yogurt";
  auto rev = fkg::derive_revision(store, log, "smoothie", edited, 1, "smoothie-v2", "s1", 0);
  std::cout << "revision script: " << fkg::to_json(rev.script).dump() << "\n";
  return 0;
}
