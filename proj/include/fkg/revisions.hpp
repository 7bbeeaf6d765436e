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

// Recipe revisions: edit scripts between two recipes, their application,
// lineage bookkeeping, and nearest-recipe search for picking a base to edit.
//
// Ingredient edits are keyed by ingredient id. The use list is aligned with a
// weighted edit distance in which a same-id pair costs its portion change, a
// substitution between two ingredients of the same top-level class costs one
// ReplaceIngredient plus its portion change, and every other use costs one
// Remove or Add. Steps are aligned with a plain edit distance whose
// substitutions become EditStep. Both alignments are minimal in op count.
//
// Operations apply in order. Each carries enough of the base state (old
// grams, old title, ...) to detect a script applied to the wrong base.

#ifndef FKG_REVISIONS_HPP_
#define FKG_REVISIONS_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/graph_store.hpp"
#include "fkg/ontology.hpp"
#include "fkg/recipe.hpp"
#include "fkg/text.hpp"

namespace fkg {

namespace ops {

struct AddIngredient {
  IngredientUse use;
  std::size_t index = 0;  // position in the use list after insertion
  bool operator==(const AddIngredient&) const = default;
};

struct RemoveIngredient {
  std::string ingredient_id;
  bool operator==(const RemoveIngredient&) const = default;
};

// Portion change of one use. Guards on the old grams.
struct ChangeQuantity {
  std::string ingredient_id;
  double old_grams = 0.0;
  double new_grams = 0.0;
  double quantity = 0.0;
  Unit unit = Unit::kGram;
  bool operator==(const ChangeQuantity&) const = default;
};

// Swaps the ingredient of a use in place and renames step references.
struct ReplaceIngredient {
  std::string old_id;
  std::string new_id;
  bool operator==(const ReplaceIngredient&) const = default;
};

struct InsertStep {
  std::size_t index = 0;
  Step step;
  bool operator==(const InsertStep&) const = default;
};

struct DeleteStep {
  std::size_t index = 0;
  bool operator==(const DeleteStep&) const = default;
};

struct EditStep {
  std::size_t index = 0;
  Step step;
  bool operator==(const EditStep&) const = default;
};

struct SetTitle {
  std::string old_title;
  std::string new_title;
  bool operator==(const SetTitle&) const = default;
};

struct SetServings {
  int old_servings = 1;
  int new_servings = 1;
  bool operator==(const SetServings&) const = default;
};

struct SetRegions {
  std::vector<RegionTag> old_regions;
  std::vector<RegionTag> new_regions;
  bool operator==(const SetRegions&) const = default;
};

}  // namespace ops

using EditOp = std::variant<ops::AddIngredient, ops::RemoveIngredient, ops::ChangeQuantity,
                            ops::ReplaceIngredient, ops::InsertStep, ops::DeleteStep,
                            ops::EditStep, ops::SetTitle, ops::SetServings, ops::SetRegions>;

struct EditScript {
  std::vector<EditOp> ops;

  bool empty() const { return ops.empty(); }
  std::size_t size() const { return ops.size(); }
  bool operator==(const EditScript&) const = default;
};

// ---------------------------------------------------------------------------
// Serialization: {"ops": [{"op": "<tag>", ...fields}, ...]}

namespace detail {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

[[noreturn]] inline void bad_script(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, field + ": " + what, field);
}

inline json regions_to_json(const std::vector<RegionTag>& regions) {
  json a = json::array();
  for (const auto& t : regions) a.push_back(to_json(t));
  return a;
}

inline std::vector<RegionTag> regions_from_json(const json& j, const std::string& at) {
  json wrapper = {{"title", ""}, {"uses", json::array()}, {"steps", json::array()},
                  {"regions", j}};
  try {
    return recipe_from_json(wrapper).regions;
  } catch (const Error& e) {
    bad_script(at, e.what());
  }
}

inline IngredientUse use_from_json(const json& j, const std::string& at) {
  json wrapper = {{"title", ""}, {"uses", json::array({j})}, {"steps", json::array()}};
  try {
    return recipe_from_json(wrapper).uses.at(0);
  } catch (const Error& e) {
    bad_script(at, e.what());
  }
}

inline Step step_from_json(const json& j, const std::string& at) {
  json wrapper = {{"title", ""}, {"uses", json::array()}, {"steps", json::array({j})}};
  try {
    return recipe_from_json(wrapper).steps.at(0);
  } catch (const Error& e) {
    bad_script(at, e.what());
  }
}

}  // namespace detail

inline json to_json(const EditOp& op) {
  return std::visit(
      detail::Overloaded{
          [](const ops::AddIngredient& o) {
            return json{{"op", "add_ingredient"}, {"use", to_json(o.use)}, {"index", o.index}};
          },
          [](const ops::RemoveIngredient& o) {
            return json{{"op", "remove_ingredient"}, {"ingredient_id", o.ingredient_id}};
          },
          [](const ops::ChangeQuantity& o) {
            return json{{"op", "change_quantity"}, {"ingredient_id", o.ingredient_id},
                        {"old_grams", o.old_grams}, {"new_grams", o.new_grams},
                        {"quantity", o.quantity},   {"unit", to_string(o.unit)}};
          },
          [](const ops::ReplaceIngredient& o) {
            return json{{"op", "replace_ingredient"}, {"old_id", o.old_id}, {"new_id", o.new_id}};
          },
          [](const ops::InsertStep& o) {
            return json{{"op", "insert_step"}, {"index", o.index}, {"step", to_json(o.step)}};
          },
          [](const ops::DeleteStep& o) {
            return json{{"op", "delete_step"}, {"index", o.index}};
          },
          [](const ops::EditStep& o) {
            return json{{"op", "edit_step"}, {"index", o.index}, {"step", to_json(o.step)}};
          },
          [](const ops::SetTitle& o) {
            return json{{"op", "set_title"}, {"old", o.old_title}, {"new", o.new_title}};
          },
          [](const ops::SetServings& o) {
            return json{{"op", "set_servings"}, {"old", o.old_servings}, {"new", o.new_servings}};
          },
          [](const ops::SetRegions& o) {
            return json{{"op", "set_regions"},
                        {"old", detail::regions_to_json(o.old_regions)},
                        {"new", detail::regions_to_json(o.new_regions)}};
          },
      },
      op);
}

inline json to_json(const EditScript& script) {
  json a = json::array();
  for (const auto& op : script.ops) a.push_back(to_json(op));
  return json{{"ops", a}};
}

inline EditScript script_from_json(const json& j) {
  using detail::bad_script;
  if (!j.is_object() || !j.contains("ops") || !j["ops"].is_array()) {
    bad_script("ops", "expected an object with an ops array");
  }
  EditScript script;
  const json& arr = j["ops"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& o = arr[i];
    std::string at = "ops[" + std::to_string(i) + "]";
    auto field = [&](const char* key) -> const json& {
      if (!o.is_object() || !o.contains(key)) bad_script(at + "." + key, "missing field");
      return o[key];
    };
    auto str = [&](const char* key) {
      const json& v = field(key);
      if (!v.is_string()) bad_script(at + "." + key, "expected a string");
      return v.get<std::string>();
    };
    auto num = [&](const char* key) {
      const json& v = field(key);
      if (!v.is_number()) bad_script(at + "." + key, "expected a number");
      return v.get<double>();
    };
    auto index = [&](const char* key) {
      const json& v = field(key);
      if (!v.is_number_unsigned()) bad_script(at + "." + key, "expected an index");
      return v.get<std::size_t>();
    };
    auto integer = [&](const char* key) {
      const json& v = field(key);
      if (!v.is_number_integer()) bad_script(at + "." + key, "expected an integer");
      return v.get<int>();
    };
    std::string tag = str("op");
    if (tag == "add_ingredient") {
      script.ops.push_back(
          ops::AddIngredient{detail::use_from_json(field("use"), at + ".use"), index("index")});
    } else if (tag == "remove_ingredient") {
      script.ops.push_back(ops::RemoveIngredient{str("ingredient_id")});
    } else if (tag == "change_quantity") {
      auto unit = unit_from_string(str("unit"));
      if (!unit) bad_script(at + ".unit", "unknown unit");
      script.ops.push_back(ops::ChangeQuantity{str("ingredient_id"), num("old_grams"),
                                               num("new_grams"), num("quantity"), *unit});
    } else if (tag == "replace_ingredient") {
      script.ops.push_back(ops::ReplaceIngredient{str("old_id"), str("new_id")});
    } else if (tag == "insert_step") {
      script.ops.push_back(
          ops::InsertStep{index("index"), detail::step_from_json(field("step"), at + ".step")});
    } else if (tag == "delete_step") {
      script.ops.push_back(ops::DeleteStep{index("index")});
    } else if (tag == "edit_step") {
      script.ops.push_back(
          ops::EditStep{index("index"), detail::step_from_json(field("step"), at + ".step")});
    } else if (tag == "set_title") {
      script.ops.push_back(ops::SetTitle{str("old"), str("new")});
    } else if (tag == "set_servings") {
      script.ops.push_back(ops::SetServings{integer("old"), integer("new")});
    } else if (tag == "set_regions") {
      script.ops.push_back(
          ops::SetRegions{detail::regions_from_json(field("old"), at + ".old"),
                          detail::regions_from_json(field("new"), at + ".new")});
    } else {
      bad_script(at + ".op", "unknown op '" + tag + "'");
    }
  }
  return script;
}

// ---------------------------------------------------------------------------
// apply

namespace detail {

[[noreturn]] inline void stale(const std::string& what) {
  throw Error(ErrorCode::kStaleBase, "edit script does not match base: " + what, "script");
}

inline std::vector<IngredientUse>::iterator find_use(std::vector<IngredientUse>& uses,
                                                     std::string_view id) {
  return std::find_if(uses.begin(), uses.end(),
                      [&](const IngredientUse& u) { return u.ingredient_id == id; });
}

inline void apply_op(Recipe& r, const EditOp& op) {
  std::visit(
      Overloaded{
          [&](const ops::AddIngredient& o) {
            if (find_use(r.uses, o.use.ingredient_id) != r.uses.end()) {
              stale("ingredient '" + o.use.ingredient_id + "' already present");
            }
            if (o.index > r.uses.size()) stale("add index out of range");
            r.uses.insert(r.uses.begin() + static_cast<std::ptrdiff_t>(o.index), o.use);
          },
          [&](const ops::RemoveIngredient& o) {
            auto it = find_use(r.uses, o.ingredient_id);
            if (it == r.uses.end()) stale("ingredient '" + o.ingredient_id + "' not present");
            r.uses.erase(it);
          },
          [&](const ops::ChangeQuantity& o) {
            auto it = find_use(r.uses, o.ingredient_id);
            if (it == r.uses.end()) stale("ingredient '" + o.ingredient_id + "' not present");
            if (it->grams != o.old_grams) {
              stale("'" + o.ingredient_id + "' has " + text::format_number(it->grams) +
                    " g, script expects " + text::format_number(o.old_grams) + " g");
            }
            it->grams = o.new_grams;
            it->quantity = o.quantity;
            it->unit = o.unit;
          },
          [&](const ops::ReplaceIngredient& o) {
            auto it = find_use(r.uses, o.old_id);
            if (it == r.uses.end()) stale("ingredient '" + o.old_id + "' not present");
            if (find_use(r.uses, o.new_id) != r.uses.end()) {
              stale("ingredient '" + o.new_id + "' already present");
            }
            it->ingredient_id = o.new_id;
            for (auto& step : r.steps) {
              std::replace(step.ingredients.begin(), step.ingredients.end(), o.old_id, o.new_id);
            }
          },
          [&](const ops::InsertStep& o) {
            if (o.index > r.steps.size()) stale("insert_step index out of range");
            r.steps.insert(r.steps.begin() + static_cast<std::ptrdiff_t>(o.index), o.step);
          },
          [&](const ops::DeleteStep& o) {
            if (o.index >= r.steps.size()) stale("delete_step index out of range");
            r.steps.erase(r.steps.begin() + static_cast<std::ptrdiff_t>(o.index));
          },
          [&](const ops::EditStep& o) {
            if (o.index >= r.steps.size()) stale("edit_step index out of range");
            r.steps[o.index] = o.step;
          },
          [&](const ops::SetTitle& o) {
            if (r.title != o.old_title) stale("title differs");
            r.title = o.new_title;
          },
          [&](const ops::SetServings& o) {
            if (r.servings != o.old_servings) stale("servings differ");
            r.servings = o.new_servings;
          },
          [&](const ops::SetRegions& o) {
            if (r.regions != o.old_regions) stale("regions differ");
            r.regions = o.new_regions;
          },
      },
      op);
}

}  // namespace detail

// Applies `script` to `base`. Throws kStaleBase when a guard or index does not
// match and kInvalidRecipe when the result breaks a recipe invariant.
inline Recipe apply(const Recipe& base, const EditScript& script) {
  Recipe r = base;
  for (const auto& op : script.ops) detail::apply_op(r, op);
  validate_structure(r);
  return r;
}

// ---------------------------------------------------------------------------
// diff

namespace detail {

inline bool same_link(const IngredientUse& a, const IngredientUse& b) {
  return a.step_index == b.step_index && a.process == b.process;
}

inline bool same_portion(const IngredientUse& a, const IngredientUse& b) {
  return a.grams == b.grams && a.quantity == b.quantity && a.unit == b.unit;
}

struct UseAlignment {
  std::vector<std::size_t> removed;                        // indices into a
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // aligned (i, j)
  std::vector<std::size_t> added;                          // indices into b
  std::size_t cost = 0;
};

// Minimal-cost alignment of two use lists (see file comment for costs).
inline UseAlignment align_uses(const std::vector<IngredientUse>& a,
                               const std::vector<IngredientUse>& b, const Ontology* ontology) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::set<std::string> ids_a;
  std::set<std::string> ids_b;
  for (const auto& u : a) ids_a.insert(u.ingredient_id);
  for (const auto& u : b) ids_b.insert(u.ingredient_id);

  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 4;
  auto pair_cost = [&](std::size_t i, std::size_t j) -> std::size_t {
    const auto& x = a[i];
    const auto& y = b[j];
    if (!same_link(x, y)) return kInf;
    std::size_t portion = same_portion(x, y) ? 0 : 1;
    if (x.ingredient_id == y.ingredient_id) return portion;
    if (!ontology || ids_b.count(x.ingredient_id) || ids_a.count(y.ingredient_id)) return kInf;
    if (!ontology->contains(x.ingredient_id) || !ontology->contains(y.ingredient_id)) return kInf;
    if (ontology->similarity(x.ingredient_id, y.ingredient_id) <= 0.0) return kInf;
    return 1 + portion;
  };

  // cost[i][j]: cheapest way to turn a[i..] into b[j..].
  std::vector<std::vector<std::size_t>> cost(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n && j == m) continue;
      std::size_t best = kInf;
      if (i < n && j < m) {
        std::size_t c = pair_cost(i, j);
        if (c < kInf) best = std::min(best, c + cost[i + 1][j + 1]);
      }
      if (i < n) best = std::min(best, 1 + cost[i + 1][j]);
      if (j < m) best = std::min(best, 1 + cost[i][j + 1]);
      cost[i][j] = best;
    }
  }

  UseAlignment out;
  out.cost = cost[0][0];
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    if (i < n && j < m) {
      std::size_t c = pair_cost(i, j);
      if (c < kInf && c + cost[i + 1][j + 1] == cost[i][j]) {
        out.pairs.emplace_back(i, j);
        ++i;
        ++j;
        continue;
      }
    }
    if (i < n && 1 + cost[i + 1][j] == cost[i][j]) {
      out.removed.push_back(i++);
    } else {
      out.added.push_back(j++);
    }
  }
  return out;
}

// Minimal InsertStep/DeleteStep/EditStep script turning `a` into `b`, in
// descending position order so earlier ops never shift later ones.
inline std::vector<EditOp> diff_steps(const std::vector<Step>& a, const std::vector<Step>& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  std::vector<EditOp> out;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && d[i][j] == d[i - 1][j - 1]) {
      --i;
      --j;
    } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
      out.push_back(ops::EditStep{i - 1, b[j - 1]});
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      out.push_back(ops::DeleteStep{i - 1});
      --i;
    } else {
      out.push_back(ops::InsertStep{i, b[j - 1]});
      --j;
    }
  }
  return out;
}

}  // namespace detail

// Edit script with apply(a, diff(a, b)) content-equal to b. Deterministic.
// Without an ontology no ReplaceIngredient is emitted.
inline EditScript diff(const Recipe& a, const Recipe& b, const Ontology* ontology = nullptr) {
  EditScript script;
  if (a.title != b.title) script.ops.push_back(ops::SetTitle{a.title, b.title});
  if (a.servings != b.servings) script.ops.push_back(ops::SetServings{a.servings, b.servings});
  std::vector<RegionTag> ra = a.regions;
  std::vector<RegionTag> rb = b.regions;
  if (ra != rb) script.ops.push_back(ops::SetRegions{ra, rb});

  auto align = detail::align_uses(a.uses, b.uses, ontology);
  for (std::size_t i : align.removed) {
    script.ops.push_back(ops::RemoveIngredient{a.uses[i].ingredient_id});
  }
  std::vector<Step> renamed = a.steps;
  for (auto [i, j] : align.pairs) {
    const auto& x = a.uses[i];
    const auto& y = b.uses[j];
    if (x.ingredient_id != y.ingredient_id) {
      script.ops.push_back(ops::ReplaceIngredient{x.ingredient_id, y.ingredient_id});
      for (auto& step : renamed) {
        std::replace(step.ingredients.begin(), step.ingredients.end(), x.ingredient_id,
                     y.ingredient_id);
      }
    }
    if (!detail::same_portion(x, y)) {
      script.ops.push_back(
          ops::ChangeQuantity{y.ingredient_id, x.grams, y.grams, y.quantity, y.unit});
    }
  }
  for (std::size_t j : align.added) script.ops.push_back(ops::AddIngredient{b.uses[j], j});
  for (auto& op : detail::diff_steps(renamed, b.steps)) script.ops.push_back(std::move(op));
  return script;
}

// ---------------------------------------------------------------------------
// Lineage

struct Lineage {
  std::string recipe_id;
  std::string parent_id;
  std::string script_id;
  std::int64_t timestamp = 0;  // milliseconds since the Unix epoch

  bool operator==(const Lineage&) const = default;
};

inline json to_json(const Lineage& l) {
  return json{{"recipe_id", l.recipe_id},
              {"parent_id", l.parent_id},
              {"script_id", l.script_id},
              {"timestamp", l.timestamp}};
}

// Immutable edit scripts and the parent links between recipe revisions.
// The links form a forest: a revision always gets a fresh recipe id.
class RevisionLog {
 public:
  bool has_script(const std::string& id) const { return scripts_.count(id) > 0; }

  const EditScript& script(const std::string& id) const {
    auto it = scripts_.find(id);
    if (it == scripts_.end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown script id '" + id + "'", "script_id");
    }
    return it->second;
  }

  const Lineage* lineage(const std::string& recipe_id) const {
    auto it = lineage_.find(recipe_id);
    return it == lineage_.end() ? nullptr : &it->second;
  }

  bool knows(const std::string& recipe_id) const {
    return lineage_.count(recipe_id) > 0 || parents_.count(recipe_id) > 0;
  }

  // `recipe_id`, its parent, grandparent, ... up to the first unrevised
  // ancestor.
  std::vector<std::string> chain(const std::string& recipe_id) const {
    std::vector<std::string> out{recipe_id};
    std::set<std::string> seen{recipe_id};
    for (const Lineage* l = lineage(recipe_id); l; l = lineage(l->parent_id)) {
      if (!seen.insert(l->parent_id).second) break;
      out.push_back(l->parent_id);
    }
    return out;
  }

  // Throws kVersionConflict unless `l` can be recorded as a fresh leaf.
  void check_record(const Lineage& l) const {
    if (scripts_.count(l.script_id)) {
      throw Error(ErrorCode::kVersionConflict, "script id '" + l.script_id + "' already used",
                  "script_id");
    }
    if (l.recipe_id.empty() || l.recipe_id == l.parent_id || knows(l.recipe_id)) {
      throw Error(ErrorCode::kVersionConflict,
                  "recipe '" + l.recipe_id + "' already takes part in a lineage", "id");
    }
  }

  void record(Lineage l, EditScript script) {
    check_record(l);
    scripts_.emplace(l.script_id, std::move(script));
    parents_.insert(l.parent_id);
    std::string id = l.recipe_id;
    lineage_.emplace(std::move(id), std::move(l));
  }

  // Snapshot loading: inserts without the freshness checks.
  void restore(Lineage l, EditScript script) {
    scripts_[l.script_id] = std::move(script);
    parents_.insert(l.parent_id);
    std::string id = l.recipe_id;
    lineage_[std::move(id)] = std::move(l);
  }

  const std::map<std::string, EditScript>& scripts() const { return scripts_; }
  const std::map<std::string, Lineage>& lineages() const { return lineage_; }

 private:
  std::map<std::string, EditScript> scripts_;
  std::map<std::string, Lineage> lineage_;
  std::multiset<std::string> parents_;
};

struct RevisionResult {
  Recipe recipe;
  Lineage lineage;
  EditScript script;
};

// Validates a revision of `base_id` without touching the store or the log.
// When `expected_version` is given it must equal the base's current version.
inline RevisionResult plan_revision(const GraphStore& store, const RevisionLog& log,
                                    const std::string& base_id, Recipe edited,
                                    std::optional<std::uint64_t> expected_version,
                                    const std::string& new_id, const std::string& script_id,
                                    std::int64_t timestamp) {
  if (!store.contains(base_id)) {
    throw Error(ErrorCode::kUnknownRecipe, "unknown base recipe '" + base_id + "'", "id");
  }
  if (expected_version && *expected_version != store.version(base_id)) {
    throw Error(ErrorCode::kVersionConflict,
                "base '" + base_id + "' is at version " +
                    std::to_string(store.version(base_id)) + ", edit was made against " +
                    std::to_string(*expected_version),
                "base_version");
  }
  if (new_id.empty() || new_id == base_id || store.contains(new_id)) {
    throw Error(ErrorCode::kVersionConflict, "revision id '" + new_id + "' is not fresh", "id");
  }
  Lineage lineage{new_id, base_id, script_id, timestamp};
  log.check_record(lineage);
  const Recipe& base = store.get(base_id);
  edited.id = new_id;
  edited.lineage.reset();
  normalize_regions(edited.regions);
  store.validate(edited);
  EditScript script = diff(base, edited, &store.ontology());
  edited.lineage = LineagePointer{base_id, script_id};
  return RevisionResult{std::move(edited), std::move(lineage), std::move(script)};
}

// Stores a planned revision. Cannot fail for a plan made against the current
// store and log.
inline void commit_revision(GraphStore& store, RevisionLog& log, const RevisionResult& plan) {
  store.upsert(plan.recipe);
  log.record(plan.lineage, plan.script);
}

// Stores `edited` as a new revision of `base_id` under `new_id`, recording
// the edit script and lineage. All-or-nothing.
inline RevisionResult derive_revision(GraphStore& store, RevisionLog& log,
                                      const std::string& base_id, Recipe edited,
                                      std::optional<std::uint64_t> expected_version,
                                      const std::string& new_id, const std::string& script_id,
                                      std::int64_t timestamp) {
  RevisionResult plan = plan_revision(store, log, base_id, std::move(edited), expected_version,
                                      new_id, script_id, timestamp);
  commit_revision(store, log, plan);
  return plan;
}

// ---------------------------------------------------------------------------
// Nearest-recipe search

struct RecipeSketch {
  std::string title;
  std::vector<std::string> ingredients;
};

struct NearestHit {
  std::string recipe_id;
  double score = 0.0;
  double ingredient_score = 0.0;
  double title_score = 0.0;
};

inline constexpr double kDefaultTitleWeight = 0.1;

// (sum over a of max_b sim(a, b) + sum over b of max_a sim(a, b)) / (|A| + |B|)
inline double soft_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b,
                           const Ontology& ontology) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::vector<double>> sim(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) sim[i][j] = ontology.similarity(a[i], b[j]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += *std::max_element(sim[i].begin(), sim[i].end());
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, sim[i][j]);
    total += best;
  }
  return total / static_cast<double>(a.size() + b.size());
}

// Jaccard overlap of lowercase title tokens.
inline double title_overlap(std::string_view a, std::string_view b) {
  auto ta = text::tokens(a);
  auto tb = text::tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

// Top-k stored recipes by soft-Jaccard ingredient similarity plus
// title_weight times title overlap; ties broken by id.
inline std::vector<NearestHit> nearest(const RecipeSketch& sketch, std::size_t k,
                                       const GraphStore& store,
                                       double title_weight = kDefaultTitleWeight) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "k");
  const Ontology& onto = store.ontology();
  std::vector<std::string> wanted;
  for (const auto& id : sketch.ingredients) {
    if (!onto.contains(id)) {
      throw Error(ErrorCode::kUnknownIngredient, "unknown ingredient id '" + id + "'",
                  "ingredients");
    }
    if (std::find(wanted.begin(), wanted.end(), id) == wanted.end()) wanted.push_back(id);
  }
  std::vector<NearestHit> hits;
  hits.reserve(store.size());
  for (const auto& [id, entry] : store.entries()) {
    std::vector<std::string> have;
    for (const auto& u : entry.recipe.uses) have.push_back(u.ingredient_id);
    NearestHit h;
    h.recipe_id = id;
    h.ingredient_score = soft_jaccard(wanted, have, onto);
    h.title_score = title_overlap(sketch.title, entry.recipe.title);
    h.score = h.ingredient_score + title_weight * h.title_score;
    hits.push_back(std::move(h));
  }
  std::sort(hits.begin(), hits.end(), [](const NearestHit& x, const NearestHit& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.recipe_id < y.recipe_id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

}  // namespace fkg

#endif  // FKG_REVISIONS_HPP_
