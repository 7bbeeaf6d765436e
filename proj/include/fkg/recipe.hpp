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

// Recipe documents: ingredient-use edges carrying portion and step, ordered
// steps, region tags and an optional lineage pointer.

#ifndef FKG_RECIPE_HPP_
#define FKG_RECIPE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/text.hpp"

namespace fkg {

using json = nlohmann::json;

enum class Unit { kGram, kMilliliter, kCup, kTablespoon, kTeaspoon, kPiece, kUnitless };

inline constexpr Unit kAllUnits[] = {Unit::kGram,       Unit::kMilliliter, Unit::kCup,
                                     Unit::kTablespoon, Unit::kTeaspoon,   Unit::kPiece,
                                     Unit::kUnitless};

inline std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::kGram: return "gram";
    case Unit::kMilliliter: return "milliliter";
    case Unit::kCup: return "cup";
    case Unit::kTablespoon: return "tablespoon";
    case Unit::kTeaspoon: return "teaspoon";
    case Unit::kPiece: return "piece";
    case Unit::kUnitless: return "unitless";
  }
  return "unitless";
}

inline std::optional<Unit> unit_from_string(std::string_view s) {
  for (Unit u : kAllUnits) {
    if (to_string(u) == s) return u;
  }
  return std::nullopt;
}

enum class RegionRelation { kOrigin, kAvailable, kPopular };

inline std::string_view to_string(RegionRelation r) {
  switch (r) {
    case RegionRelation::kOrigin: return "origin";
    case RegionRelation::kAvailable: return "available";
    case RegionRelation::kPopular: return "popular";
  }
  return "origin";
}

inline std::optional<RegionRelation> relation_from_string(std::string_view s) {
  for (auto r : {RegionRelation::kOrigin, RegionRelation::kAvailable,
                 RegionRelation::kPopular}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

struct IngredientUse {
  std::string ingredient_id;
  double quantity = 0.0;
  Unit unit = Unit::kGram;
  double grams = 0.0;
  std::size_t step_index = 0;
  std::string process;

  bool operator==(const IngredientUse&) const = default;
};

struct Step {
  std::string text;
  std::string process;
  std::vector<std::string> ingredients;  // referenced ingredient ids

  bool operator==(const Step&) const = default;
};

struct RegionTag {
  std::string code;
  RegionRelation relation = RegionRelation::kOrigin;

  auto operator<=>(const RegionTag&) const = default;
};

struct LineagePointer {
  std::string parent_id;
  std::string script_id;

  bool operator==(const LineagePointer&) const = default;
};

struct Recipe {
  std::string id;
  std::string title;
  int servings = 1;
  std::vector<IngredientUse> uses;
  std::vector<Step> steps;
  std::vector<RegionTag> regions;  // kept sorted and unique
  std::optional<LineagePointer> lineage;

  bool operator==(const Recipe&) const = default;

  const IngredientUse* find_use(std::string_view ingredient_id) const {
    for (const auto& u : uses) {
      if (u.ingredient_id == ingredient_id) return &u;
    }
    return nullptr;
  }
};

// Equality of everything a revision can change (id and lineage excluded).
inline bool same_content(const Recipe& a, const Recipe& b) {
  return a.title == b.title && a.servings == b.servings && a.uses == b.uses &&
         a.steps == b.steps && a.regions == b.regions;
}

inline void normalize_regions(std::vector<RegionTag>& regions) {
  std::sort(regions.begin(), regions.end());
  regions.erase(std::unique(regions.begin(), regions.end()), regions.end());
}

// Checks the invariants that do not need the ontology: at least one use,
// non-empty steps, unique ingredient ids, step links in range, step references
// drawn from the uses, servings >= 1, finite non-negative amounts and
// uppercase region codes. Throws Error(kInvalidRecipe) naming the field.
inline void validate_structure(const Recipe& r) {
  auto fail = [](const std::string& msg, const std::string& field) {
    throw Error(ErrorCode::kInvalidRecipe, msg, field);
  };
  if (r.servings < 1) fail("servings must be >= 1", "servings");
  if (r.uses.empty()) fail("recipe needs at least one ingredient use", "uses");
  if (r.steps.empty()) fail("recipe needs at least one step", "steps");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < r.uses.size(); ++i) {
    const auto& u = r.uses[i];
    std::string at = "uses[" + std::to_string(i) + "]";
    if (u.ingredient_id.empty()) fail("empty ingredient id", at + ".ingredient_id");
    if (!ids.insert(u.ingredient_id).second) {
      fail("ingredient '" + u.ingredient_id + "' used twice", at + ".ingredient_id");
    }
    if (!std::isfinite(u.quantity) || u.quantity < 0) {
      fail("quantity must be finite and >= 0", at + ".quantity");
    }
    if (!std::isfinite(u.grams) || u.grams < 0) {
      fail("grams must be finite and >= 0", at + ".grams");
    }
    if (u.step_index >= r.steps.size()) {
      fail("step_index " + std::to_string(u.step_index) + " out of range",
           at + ".step_index");
    }
  }
  for (std::size_t s = 0; s < r.steps.size(); ++s) {
    for (std::size_t k = 0; k < r.steps[s].ingredients.size(); ++k) {
      if (!ids.count(r.steps[s].ingredients[k])) {
        fail("step references ingredient '" + r.steps[s].ingredients[k] +
                 "' that the recipe does not use",
             "steps[" + std::to_string(s) + "].ingredients[" + std::to_string(k) + "]");
      }
    }
  }
  for (std::size_t i = 0; i < r.regions.size(); ++i) {
    const auto& code = r.regions[i].code;
    bool upper = !code.empty() && std::none_of(code.begin(), code.end(), [](char c) {
      return std::islower(static_cast<unsigned char>(c)) || text::is_space(c);
    });
    if (!upper) {
      fail("region code must be non-empty uppercase", "regions[" + std::to_string(i) + "].code");
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const IngredientUse& u) {
  return json{{"ingredient_id", u.ingredient_id}, {"quantity", u.quantity},
              {"unit", to_string(u.unit)},        {"grams", u.grams},
              {"step_index", u.step_index},       {"process", u.process}};
}

inline json to_json(const Step& s) {
  return json{{"text", s.text}, {"process", s.process}, {"ingredients", s.ingredients}};
}

inline json to_json(const RegionTag& t) {
  return json{{"code", t.code}, {"relation", to_string(t.relation)}};
}

inline json to_json(const Recipe& r) {
  json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["servings"] = r.servings;
  j["uses"] = json::array();
  for (const auto& u : r.uses) j["uses"].push_back(to_json(u));
  j["steps"] = json::array();
  for (const auto& s : r.steps) j["steps"].push_back(to_json(s));
  j["regions"] = json::array();
  for (const auto& t : r.regions) j["regions"].push_back(to_json(t));
  if (r.lineage) {
    j["lineage"] = {{"parent_id", r.lineage->parent_id},
                    {"script_id", r.lineage->script_id}};
  }
  return j;
}

namespace detail {

[[noreturn]] inline void bad_field(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kInvalidRecipe, field + ": " + what, field);
}

inline const json& require(const json& j, const char* key, const std::string& at) {
  if (!j.is_object()) bad_field(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad_field(at.empty() ? key : at + "." + key, "missing field");
  return *it;
}

inline std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) bad_field(field, "expected a string");
  return j.get<std::string>();
}

inline double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

inline std::size_t get_index(const json& j, const std::string& field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    bad_field(field, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace detail

// Parses a recipe document. "grams" may be absent on a use only when
// `allow_missing_grams` is set; callers then resolve it from quantity and unit
// (the use's grams is left at -1 as a marker).
inline Recipe recipe_from_json(const json& j, bool allow_missing_grams = false) {
  using namespace detail;
  if (!j.is_object()) bad_field("recipe", "expected an object");
  Recipe r;
  if (auto it = j.find("id"); it != j.end() && !it->is_null()) r.id = get_string(*it, "id");
  r.title = get_string(require(j, "title", ""), "title");
  if (auto it = j.find("servings"); it != j.end()) {
    if (!it->is_number_integer()) bad_field("servings", "expected an integer");
    r.servings = it->get<int>();
  }
  const json& uses = require(j, "uses", "");
  if (!uses.is_array()) bad_field("uses", "expected an array");
  for (std::size_t i = 0; i < uses.size(); ++i) {
    std::string at = "uses[" + std::to_string(i) + "]";
    const json& u = uses[i];
    IngredientUse use;
    use.ingredient_id = get_string(require(u, "ingredient_id", at), at + ".ingredient_id");
    use.quantity = get_number(require(u, "quantity", at), at + ".quantity");
    std::string unit = get_string(require(u, "unit", at), at + ".unit");
    auto parsed = unit_from_string(unit);
    if (!parsed) bad_field(at + ".unit", "unknown unit '" + unit + "'");
    use.unit = *parsed;
    if (auto it = u.find("grams"); it != u.end()) {
      use.grams = get_number(*it, at + ".grams");
    } else if (allow_missing_grams) {
      use.grams = -1.0;
    } else {
      bad_field(at + ".grams", "missing field");
    }
    if (auto it = u.find("step_index"); it != u.end()) {
      use.step_index = get_index(*it, at + ".step_index");
    }
    if (auto it = u.find("process"); it != u.end()) {
      use.process = get_string(*it, at + ".process");
    }
    r.uses.push_back(std::move(use));
  }
  const json& steps = require(j, "steps", "");
  if (!steps.is_array()) bad_field("steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string at = "steps[" + std::to_string(i) + "]";
    const json& s = steps[i];
    Step step;
    if (s.is_string()) {
      step.text = s.get<std::string>();
    } else {
      step.text = get_string(require(s, "text", at), at + ".text");
      if (auto it = s.find("process"); it != s.end()) {
        step.process = get_string(*it, at + ".process");
      }
      if (auto it = s.find("ingredients"); it != s.end()) {
        if (!it->is_array()) bad_field(at + ".ingredients", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
          step.ingredients.push_back(get_string(
              (*it)[k], at + ".ingredients[" + std::to_string(k) + "]"));
        }
      }
    }
    r.steps.push_back(std::move(step));
  }
  if (auto it = j.find("regions"); it != j.end()) {
    if (!it->is_array()) bad_field("regions", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string at = "regions[" + std::to_string(i) + "]";
      const json& t = (*it)[i];
      RegionTag tag;
      tag.code = get_string(require(t, "code", at), at + ".code");
      std::string rel = get_string(require(t, "relation", at), at + ".relation");
      auto parsed = relation_from_string(rel);
      if (!parsed) bad_field(at + ".relation", "unknown relation '" + rel + "'");
      tag.relation = *parsed;
      r.regions.push_back(std::move(tag));
    }
    normalize_regions(r.regions);
  }
  if (auto it = j.find("lineage"); it != j.end() && !it->is_null()) {
    LineagePointer p;
    p.parent_id = get_string(require(*it, "parent_id", "lineage"), "lineage.parent_id");
    p.script_id = get_string(require(*it, "script_id", "lineage"), "lineage.script_id");
    r.lineage = std::move(p);
  }
  return r;
}

}  // namespace fkg

#endif  // FKG_RECIPE_HPP_
