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

// Fixture loading and random generators shared by the test binaries.

#ifndef FKG_TESTS_SUPPORT_HPP_
#define FKG_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/graph_store.hpp"
#include "fkg/nutrition.hpp"
#include "fkg/ontology.hpp"
#include "fkg/query.hpp"
#include "fkg/recipe.hpp"

namespace fkg::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(FKG_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json fixture_json(const std::string& name) {
  return nlohmann::json::parse(read_fixture(name));
}

inline std::shared_ptr<const Ontology> fixture_ontology() {
  static auto onto = std::make_shared<const Ontology>(Ontology::parse_csv(read_fixture("ontology.csv")));
  return onto;
}

inline std::shared_ptr<const Ontology> small_ontology() {
  static auto onto =
      std::make_shared<const Ontology>(Ontology::parse_csv(read_fixture("ontology_small.csv")));
  return onto;
}

inline const NutrientTable& fixture_nutrients() {
  static NutrientTable t = NutrientTable::parse_csv(read_fixture("nutrients.csv"), *fixture_ontology());
  return t;
}

inline std::vector<Recipe> fixture_recipes(const std::string& name = "recipes.json") {
  std::vector<Recipe> out;
  for (const auto& j : fixture_json(name)) out.push_back(recipe_from_json(j));
  return out;
}

inline GraphStore fixture_store() {
  GraphStore store(fixture_ontology());
  for (auto& r : fixture_recipes()) store.upsert(r);
  return store;
}

// Random tree: node 0 is the root, node i > 0 hangs under a uniformly chosen
// earlier abstract node. Leaves become concrete, inner nodes abstract.
inline Ontology random_tree(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> parent(n, 0);
  std::vector<bool> has_child(n, false);
  for (std::size_t i = 1; i < n; ++i) {
    parent[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    has_child[parent[i]] = true;
  }
  std::vector<IngredientNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].id = "n" + std::to_string(i);
    nodes[i].name = "node " + std::to_string(i);
    nodes[i].kind = (has_child[i] || i == 0) ? NodeKind::kAbstract : NodeKind::kConcrete;
    if (i > 0) nodes[i].parent = "n" + std::to_string(parent[i]);
  }
  return Ontology::build(std::move(nodes));
}

inline std::vector<std::string> concrete_ids(const Ontology& o) {
  std::vector<std::string> out;
  for (const auto& n : o.nodes()) {
    if (n.kind == NodeKind::kConcrete) out.push_back(n.id);
  }
  return out;
}

inline const char* kVerbs[] = {"fry", "boil", "mix", "cut", "bake", "stir", "slice", "roast"};

// A valid random recipe over `pool` (concrete ids) with 1..max_uses uses.
inline Recipe random_recipe(std::mt19937_64& rng, const std::vector<std::string>& pool,
                            const std::string& id, std::size_t max_uses = 6) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  Recipe r;
  r.id = id;
  r.title = std::string("dish ") + kVerbs[pick(8)] + " " + std::to_string(pick(50));
  r.servings = static_cast<int>(1 + pick(6));
  std::size_t n_steps = 1 + pick(4);
  for (std::size_t s = 0; s < n_steps; ++s) {
    Step st;
    st.process = kVerbs[pick(8)];
    st.text = st.process + " step " + std::to_string(pick(100));
    r.steps.push_back(st);
  }
  std::size_t n_uses = 1 + pick(std::min(max_uses, pool.size()));
  std::vector<std::string> chosen = pool;
  std::shuffle(chosen.begin(), chosen.end(), rng);
  chosen.resize(n_uses);
  static const Unit kUnits[] = {Unit::kGram, Unit::kMilliliter, Unit::kCup, Unit::kTablespoon,
                                Unit::kTeaspoon, Unit::kPiece, Unit::kUnitless};
  for (const auto& ing : chosen) {
    IngredientUse u;
    u.ingredient_id = ing;
    u.quantity = static_cast<double>(1 + pick(400)) / 4.0;
    u.unit = kUnits[pick(7)];
    u.grams = static_cast<double>(pick(100000)) / 100.0;
    u.step_index = pick(n_steps);
    u.process = r.steps[u.step_index].process;
    r.steps[u.step_index].ingredients.push_back(ing);
    r.uses.push_back(u);
  }
  static const char* kRegions[] = {"JP", "CN", "US", "FR", "IT"};
  static const RegionRelation kRel[] = {RegionRelation::kOrigin, RegionRelation::kAvailable,
                                        RegionRelation::kPopular};
  std::size_t n_regions = pick(3);
  for (std::size_t i = 0; i < n_regions; ++i) {
    r.regions.push_back({kRegions[pick(5)], kRel[pick(3)]});
  }
  normalize_regions(r.regions);
  return r;
}

// A valid edit of `base`: a handful of random title, servings, region, use
// and step changes drawn from `pool`.
inline Recipe mutate_recipe(std::mt19937_64& rng, const Recipe& base,
                            const std::vector<std::string>& pool) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  Recipe r = base;
  std::size_t n_edits = pick(6);
  for (std::size_t e = 0; e < n_edits; ++e) {
    switch (pick(9)) {
      case 0:
        r.title += " v" + std::to_string(pick(10));
        break;
      case 1:
        r.servings = static_cast<int>(1 + pick(8));
        break;
      case 2:
        r.regions.push_back({"JP", RegionRelation::kAvailable});
        normalize_regions(r.regions);
        break;
      case 3:
        if (r.uses.size() > 1) r.uses.erase(r.uses.begin() + static_cast<std::ptrdiff_t>(pick(r.uses.size())));
        break;
      case 4: {
        const std::string& id = pool[pick(pool.size())];
        if (r.find_use(id)) break;
        IngredientUse u;
        u.ingredient_id = id;
        u.quantity = static_cast<double>(1 + pick(20));
        u.grams = static_cast<double>(pick(50000)) / 100.0;
        u.step_index = pick(r.steps.size());
        u.process = r.steps[u.step_index].process;
        r.uses.insert(r.uses.begin() + static_cast<std::ptrdiff_t>(pick(r.uses.size() + 1)), u);
        r.steps[u.step_index].ingredients.push_back(id);
        break;
      }
      case 5: {
        auto& u = r.uses[pick(r.uses.size())];
        u.grams = static_cast<double>(pick(50000)) / 100.0;
        if (pick(2)) u.quantity += 1;
        break;
      }
      case 6: {
        auto& u = r.uses[pick(r.uses.size())];
        const std::string& id = pool[pick(pool.size())];
        if (r.find_use(id)) break;
        for (auto& st : r.steps) std::replace(st.ingredients.begin(), st.ingredients.end(), u.ingredient_id, id);
        u.ingredient_id = id;
        break;
      }
      case 7: {
        Step st;
        st.process = kVerbs[pick(8)];
        st.text = st.process + " extra " + std::to_string(pick(100));
        std::size_t at = pick(r.steps.size() + 1);
        r.steps.insert(r.steps.begin() + static_cast<std::ptrdiff_t>(at), st);
        for (auto& u : r.uses) u.step_index += u.step_index >= at ? 1 : 0;
        break;
      }
      default:
        if (r.steps.size() > 1) {
          std::size_t at = pick(r.steps.size());
          r.steps.erase(r.steps.begin() + static_cast<std::ptrdiff_t>(at));
          for (auto& u : r.uses) {
            if (u.step_index > at || u.step_index == r.steps.size()) --u.step_index;
          }
        } else {
          r.steps[0].text += " well";
        }
        break;
    }
  }
  std::set<std::string> have;
  for (const auto& u : r.uses) have.insert(u.ingredient_id);
  for (auto& st : r.steps) {
    std::erase_if(st.ingredients, [&](const std::string& id) { return !have.count(id); });
  }
  validate_structure(r);
  return r;
}

// Random conjunction of 1..4 terms over `nodes` (any ontology ids) and the
// given nutrient keys.
inline QueryAst random_ast(std::mt19937_64& rng, const std::vector<std::string>& nodes,
                           const std::vector<std::string>& keys) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  QueryAst ast;
  std::size_t n = 1 + pick(4);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t kind = pick(10);
    if (kind < 6) {
      ast.terms.push_back(HasTerm{nodes[pick(nodes.size())], pick(3) != 0});
    } else if (kind < 8 && !keys.empty()) {
      NutrientTerm t;
      t.key = keys[pick(keys.size())];
      t.basis = pick(2) ? Basis::kPerServing : Basis::kPerRecipe;
      double a = static_cast<double>(pick(3000));
      double b = a + static_cast<double>(pick(3000));
      std::size_t shape = pick(3);
      if (shape != 1) t.lower = Bound{a, pick(2) == 0};
      if (shape != 0) t.upper = Bound{b, pick(2) == 0};
      ast.terms.push_back(t);
    } else {
      static const char* kRegions[] = {"JP", "CN", "US", "FR", "IT", "XX"};
      RegionTerm t;
      t.code = kRegions[pick(6)];
      std::size_t rel = pick(4);
      if (rel < 3) t.relation = static_cast<RegionRelation>(rel);
      ast.terms.push_back(t);
    }
  }
  return ast;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto p = std::filesystem::temp_directory_path() /
           ("fkg-" + tag + "-" + std::to_string(rng()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fkg::testing

#endif  // FKG_TESTS_SUPPORT_HPP_
