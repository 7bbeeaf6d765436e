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

// Nutrient profiles, unit resolution and dish-level derivation.
//
// A dish profile is the grams-weighted sum of its ingredients' per-100 g
// profiles. Unknown data is never read as zero: an ingredient without a
// profile, or without a value for some nutrient, marks the affected keys as
// incomplete on the derived profile.

#ifndef FKG_NUTRITION_HPP_
#define FKG_NUTRITION_HPP_

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/ontology.hpp"
#include "fkg/recipe.hpp"
#include "fkg/text.hpp"

namespace fkg {

namespace units {
inline constexpr double kCupMl = 240.0;
inline constexpr double kTablespoonMl = 15.0;
inline constexpr double kTeaspoonMl = 5.0;
}  // namespace units

inline constexpr std::array<std::string_view, 4> kCoreNutrients = {
    "energy_kcal", "protein_g", "fat_g", "carbohydrate_g"};

enum class Basis { kPer100g, kPerRecipe, kPerServing };

inline std::string_view to_string(Basis b) {
  switch (b) {
    case Basis::kPer100g: return "per_100g";
    case Basis::kPerRecipe: return "per_recipe";
    case Basis::kPerServing: return "per_serving";
  }
  return "per_recipe";
}

struct NutrientProfile {
  Basis basis = Basis::kPer100g;
  std::map<std::string, double> amounts;
  // Keys whose amount is a lower bound because some ingredient lacks a value.
  std::set<std::string> incomplete_keys;
  // Ingredients with no profile at all.
  std::set<std::string> uncovered_ingredients;

  bool complete(const std::string& key) const {
    return amounts.count(key) && !incomplete_keys.count(key);
  }

  bool operator==(const NutrientProfile&) const = default;
};

inline nlohmann::json to_json(const NutrientProfile& p) {
  nlohmann::json j;
  j["basis"] = to_string(p.basis);
  j["amounts"] = nlohmann::json::object();
  for (const auto& [k, v] : p.amounts) j["amounts"][k] = v;
  j["incomplete_keys"] = p.incomplete_keys;
  j["uncovered_ingredients"] = p.uncovered_ingredients;
  return j;
}

// Mass in grams of `quantity` `unit`s of an ingredient. Volume units use the
// density of the ingredient or its nearest ancestor; piece and unitless counts
// use the per-piece mass the same way. A zero quantity is always 0 g.
inline double resolve_grams(double quantity, Unit unit, std::string_view ingredient,
                            const Ontology& ontology) {
  if (!std::isfinite(quantity) || quantity < 0) {
    throw Error(ErrorCode::kInvalidArgument, "quantity must be finite and >= 0",
                "quantity");
  }
  const IngredientNode& node = ontology.node(ingredient);
  auto volume = [&](double ml) {
    auto density = ontology.density_of(node.id);
    if (!density) {
      throw Error(ErrorCode::kMissingDensity,
                  "no density for '" + node.id + "' or any ancestor; cannot convert " +
                      std::string(to_string(unit)) + " to grams",
                  node.id);
    }
    return ml * *density;
  };
  switch (unit) {
    case Unit::kGram: return quantity;
    case Unit::kMilliliter: return volume(quantity);
    case Unit::kCup: return volume(quantity * units::kCupMl);
    case Unit::kTablespoon: return volume(quantity * units::kTablespoonMl);
    case Unit::kTeaspoon: return volume(quantity * units::kTeaspoonMl);
    case Unit::kPiece:
    case Unit::kUnitless: {
      if (quantity == 0.0) return 0.0;
      auto piece = ontology.piece_grams_of(node.id);
      if (!piece) {
        throw Error(ErrorCode::kMissingPieceMass,
                    "no per-piece mass for '" + node.id + "' or any ancestor", node.id);
      }
      return quantity * *piece;
    }
  }
  return quantity;
}

// Per-100 g profiles keyed by ingredient id, plus the declared nutrient key set.
class NutrientTable {
 public:
  NutrientTable() = default;

  // Header `ingredient_id,<key>,<key>,...`; an empty cell means "unknown".
  // Every ingredient must be a concrete ontology node.
  static NutrientTable parse_csv(std::string_view csv, const Ontology& ontology) {
    auto rows = text::parse_csv(csv);
    if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "nutrient table is empty");
    const auto& header = rows[0];
    if (header.empty() || text::trim(header[0]) != "ingredient_id") {
      throw Error(ErrorCode::kInvalidArgument,
                  "nutrient table header must start with ingredient_id", "header");
    }
    NutrientTable table;
    std::vector<std::string> keys;
    for (std::size_t c = 1; c < header.size(); ++c) {
      std::string key(text::trim(header[c]));
      if (key.empty() || !table.keys_.insert(key).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "empty or duplicate nutrient column '" + key + "'", "header");
      }
      keys.push_back(std::move(key));
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      std::string id(text::trim(row[0]));
      std::string at = "line " + std::to_string(r + 1);
      const IngredientNode* node = ontology.find(id);
      if (!node) {
        throw Error(ErrorCode::kUnknownIngredient,
                    at + ": unknown ingredient id '" + id + "'", "ingredient_id");
      }
      if (node->kind != NodeKind::kConcrete) {
        throw Error(ErrorCode::kInvalidArgument,
                    at + ": abstract node '" + id + "' cannot carry a profile",
                    "ingredient_id");
      }
      NutrientProfile p;
      for (std::size_t c = 0; c < keys.size(); ++c) {
        if (c + 1 >= row.size()) break;
        std::string cell(text::trim(row[c + 1]));
        if (cell.empty()) continue;
        auto v = text::parse_decimal(cell);
        if (!v) {
          throw Error(ErrorCode::kInvalidArgument,
                      at + ": " + keys[c] + " must be a non-negative number, got '" +
                          cell + "'",
                      keys[c]);
        }
        p.amounts[keys[c]] = *v;
      }
      if (!table.profiles_.emplace(id, std::move(p)).second) {
        throw Error(ErrorCode::kInvalidArgument, at + ": duplicate row for '" + id + "'",
                    "ingredient_id");
      }
    }
    return table;
  }

  // Builds a table directly; amounts must be finite and non-negative.
  static NutrientTable from_profiles(std::map<std::string, NutrientProfile> profiles) {
    NutrientTable table;
    for (auto& [id, p] : profiles) {
      p.basis = Basis::kPer100g;
      for (const auto& [k, v] : p.amounts) {
        if (!std::isfinite(v) || v < 0) {
          throw Error(ErrorCode::kInvalidArgument,
                      "nutrient " + k + " of '" + id + "' must be finite and >= 0", k);
        }
        table.keys_.insert(k);
      }
    }
    table.profiles_ = std::move(profiles);
    return table;
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "ingredient_id";
    for (const auto& k : keys_) out << ',' << text::csv_escape(k);
    out << '\n';
    for (const auto& [id, p] : profiles_) {
      out << text::csv_escape(id);
      for (const auto& k : keys_) {
        out << ',';
        if (auto it = p.amounts.find(k); it != p.amounts.end()) {
          out << text::format_number(it->second);
        }
      }
      out << '\n';
    }
    return out.str();
  }

  const std::set<std::string>& keys() const { return keys_; }
  bool has_key(const std::string& key) const { return keys_.count(key) > 0; }
  std::size_t size() const { return profiles_.size(); }
  bool empty() const { return profiles_.empty(); }

  const NutrientProfile* find(std::string_view ingredient) const {
    auto it = profiles_.find(std::string(ingredient));
    return it == profiles_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, NutrientProfile>& profiles() const { return profiles_; }

  // Rejects profiles for ids missing from (or abstract in) `ontology`.
  void check_against(const Ontology& ontology) const {
    for (const auto& [id, p] : profiles_) {
      const IngredientNode* node = ontology.find(id);
      if (!node) {
        throw Error(ErrorCode::kUnknownIngredient,
                    "nutrient table references unknown ingredient '" + id + "'", id);
      }
      if (node->kind != NodeKind::kConcrete) {
        throw Error(ErrorCode::kInvalidArgument,
                    "abstract node '" + id + "' cannot carry a profile", id);
      }
    }
  }

 private:
  std::set<std::string> keys_;
  std::map<std::string, NutrientProfile> profiles_;
};

// Sum over uses of profile[key] * grams / 100 for every key of the table.
inline NutrientProfile derive_recipe_profile(const Recipe& recipe,
                                             const NutrientTable& table) {
  NutrientProfile out;
  out.basis = Basis::kPerRecipe;
  for (const auto& key : table.keys()) out.amounts[key] = 0.0;
  for (const auto& use : recipe.uses) {
    const NutrientProfile* p = table.find(use.ingredient_id);
    if (!p) {
      out.uncovered_ingredients.insert(use.ingredient_id);
      out.incomplete_keys.insert(table.keys().begin(), table.keys().end());
      continue;
    }
    for (const auto& key : table.keys()) {
      auto it = p->amounts.find(key);
      if (it == p->amounts.end()) {
        out.incomplete_keys.insert(key);
        continue;
      }
      out.amounts[key] += it->second * use.grams / 100.0;
    }
  }
  return out;
}

inline NutrientProfile per_serving(const NutrientProfile& p, int servings) {
  if (servings < 1) {
    throw Error(ErrorCode::kInvalidArgument, "servings must be >= 1", "servings");
  }
  NutrientProfile out = p;
  out.basis = Basis::kPerServing;
  for (auto& [k, v] : out.amounts) v /= static_cast<double>(servings);
  return out;
}

struct RadarAxis {
  std::string key;
  double ratio = 0.0;
  bool complete = true;

  bool operator==(const RadarAxis&) const = default;
};

// Core nutrients first in their fixed order, remaining keys lexicographic.
inline std::vector<std::string> radar_key_order(const NutrientProfile& p) {
  std::vector<std::string> keys;
  for (auto core : kCoreNutrients) {
    if (p.amounts.count(std::string(core))) keys.emplace_back(core);
  }
  for (const auto& [k, v] : p.amounts) {
    bool core = false;
    for (auto c : kCoreNutrients) core = core || c == k;
    if (!core) keys.push_back(k);
  }
  return keys;
}

inline std::vector<RadarAxis> radar_axes(const NutrientProfile& p,
                                         const std::map<std::string, double>& reference) {
  std::vector<RadarAxis> axes;
  for (const auto& key : radar_key_order(p)) {
    auto it = reference.find(key);
    if (it == reference.end()) {
      throw Error(ErrorCode::kMissingReference, "no reference value for '" + key + "'",
                  key);
    }
    if (!(it->second > 0) || !std::isfinite(it->second)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "reference value for '" + key + "' must be positive", key);
    }
    axes.push_back({key, p.amounts.at(key) / it->second, !p.incomplete_keys.count(key)});
  }
  return axes;
}

// Reference intakes: a header row of nutrient keys and one row of values.
inline std::map<std::string, double> parse_reference_csv(std::string_view csv) {
  auto rows = text::parse_csv(csv);
  if (rows.size() < 2) {
    throw Error(ErrorCode::kEmptyInput, "reference table needs a header and a value row");
  }
  std::map<std::string, double> ref;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    std::string key(text::trim(rows[0][c]));
    if (key == "ingredient_id" || key.empty()) continue;
    std::string cell = c < rows[1].size() ? std::string(text::trim(rows[1][c])) : "";
    auto v = text::parse_decimal(cell);
    if (!v || *v <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "reference value for '" + key + "' must be positive", key);
    }
    ref[key] = *v;
  }
  return ref;
}

// Adult daily reference intakes used when no reference file is configured.
inline std::map<std::string, double> default_reference_intakes() {
  return {{"energy_kcal", 2000.0},
          {"protein_g", 50.0},
          {"fat_g", 70.0},
          {"carbohydrate_g", 260.0}};
}

}  // namespace fkg

#endif  // FKG_NUTRITION_HPP_
