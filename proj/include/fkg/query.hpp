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

// Conjunctive graph queries.
//
//   query     := "" | predicate ("AND" predicate)*
//   predicate := "has(" ID ")"            exact ingredient
//              | "has~(" ID ")"           ingredient or any ontology descendant
//              | KEY ["@serving"|"@recipe"] OP NUMBER     nutrient bound
//              | ("region"|"origin"|"available"|"popular") "=" CODE
//   OP        := "<" | "<=" | ">" | ">=" | "="
//
// KEY is a nutrient column name or one of the aliases kcal, energy, protein,
// fat, carbs, carbohydrate. Nutrient bounds default to the per-recipe basis.
// Recipes whose value for a bounded nutrient is unknown never match; they are
// reported separately.
//
//   auto ast = fkg::parse_query("has~(B1136) AND has~(B1631) AND kcal<900");
//   fkg::QueryResult r = fkg::evaluate(ast, store, table);

#ifndef FKG_QUERY_HPP_
#define FKG_QUERY_HPP_

#include <algorithm>
#include <cctype>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "fkg/error.hpp"
#include "fkg/graph_store.hpp"
#include "fkg/nutrition.hpp"
#include "fkg/recipe.hpp"
#include "fkg/text.hpp"

namespace fkg {

struct Bound {
  double value = 0.0;
  bool inclusive = false;

  bool operator==(const Bound&) const = default;
};

struct HasTerm {
  std::string ingredient;
  bool expand = false;

  bool operator==(const HasTerm&) const = default;
};

struct NutrientTerm {
  std::string key;
  std::optional<Bound> lower;
  std::optional<Bound> upper;
  Basis basis = Basis::kPerRecipe;

  bool operator==(const NutrientTerm&) const = default;

  bool accepts(double v) const {
    if (lower && (lower->inclusive ? v < lower->value : v <= lower->value)) return false;
    if (upper && (upper->inclusive ? v > upper->value : v >= upper->value)) return false;
    return true;
  }
};

struct RegionTerm {
  std::string code;
  std::optional<RegionRelation> relation;  // any relation when empty

  bool operator==(const RegionTerm&) const = default;
};

using QueryTerm = std::variant<HasTerm, NutrientTerm, RegionTerm>;

struct QueryAst {
  std::vector<QueryTerm> terms;

  bool operator==(const QueryAst&) const = default;
};

namespace detail {

inline const std::map<std::string, std::string, std::less<>>& nutrient_aliases() {
  static const std::map<std::string, std::string, std::less<>> kAliases = {
      {"kcal", "energy_kcal"},       {"energy", "energy_kcal"},
      {"protein", "protein_g"},      {"fat", "fat_g"},
      {"carbs", "carbohydrate_g"},   {"carbohydrate", "carbohydrate_g"}};
  return kAliases;
}

inline std::string nutrient_display_name(const std::string& key) {
  if (key == "energy_kcal") return "kcal";
  if (key == "protein_g") return "protein";
  if (key == "fat_g") return "fat";
  if (key == "carbohydrate_g") return "carbs";
  return key;
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : s_(text) {}

  QueryAst parse() {
    QueryAst ast;
    skip_ws();
    if (pos_ == s_.size()) return ast;
    while (true) {
      ast.terms.push_back(predicate());
      skip_ws();
      if (pos_ == s_.size()) return ast;
      std::size_t at = pos_;
      std::string word = identifier();
      if (word != "AND") fail("expected AND", at);
      skip_ws();
      if (pos_ == s_.size()) fail("expected predicate after AND", pos_);
    }
  }

 private:
  [[noreturn]] static void fail(const std::string& msg, std::size_t at) {
    throw SyntaxError(msg, at);
  }

  void skip_ws() {
    while (pos_ < s_.size() && text::is_space(s_[pos_])) ++pos_;
  }

  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string op() {
    std::size_t start = pos_;
    if (peek('<') || peek('>')) {
      ++pos_;
      if (peek('=')) ++pos_;
    } else if (peek('=')) {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  QueryTerm predicate() {
    std::size_t start = pos_;
    std::string name = identifier();
    if (name.empty()) fail("expected predicate", start);
    if (name == "has") {
      HasTerm t;
      if (peek('~')) {
        t.expand = true;
        ++pos_;
      }
      expect('(');
      std::size_t id_start = pos_;
      while (pos_ < s_.size() && s_[pos_] != ')') ++pos_;
      t.ingredient = std::string(text::trim(s_.substr(id_start, pos_ - id_start)));
      if (t.ingredient.empty()) fail("expected ingredient id", id_start);
      expect(')');
      return t;
    }
    skip_ws();
    if (peek('(')) fail("unknown predicate '" + name + "'", start);
    if (name == "region" || name == "origin" || name == "available" || name == "popular") {
      std::size_t op_at = pos_;
      if (op() != "=") fail("region predicates take '='", op_at);
      skip_ws();
      std::size_t code_start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' ||
              s_[pos_] == '_')) {
        ++pos_;
      }
      if (pos_ == code_start) fail("expected region code", code_start);
      RegionTerm t;
      for (char c : s_.substr(code_start, pos_ - code_start)) {
        t.code.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      }
      if (name != "region") t.relation = relation_from_string(name);
      return t;
    }

    NutrientTerm t;
    auto alias = nutrient_aliases().find(name);
    t.key = alias == nutrient_aliases().end() ? name : alias->second;
    if (peek('@')) {
      ++pos_;
      std::size_t basis_at = pos_;
      std::string basis = identifier();
      if (basis == "serving") {
        t.basis = Basis::kPerServing;
      } else if (basis != "recipe") {
        fail("expected @serving or @recipe", basis_at);
      }
      skip_ws();
    }
    std::size_t op_at = pos_;
    std::string cmp = op();
    if (cmp.empty()) fail("expected comparison operator", op_at);
    skip_ws();
    std::size_t num_start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                                s_[pos_] == '.' || s_[pos_] == '-' || s_[pos_] == '+')) {
      ++pos_;
    }
    if (pos_ == num_start) fail("expected number", num_start);
    auto value = text::parse_decimal(s_.substr(num_start, pos_ - num_start));
    if (!value) fail("malformed number", num_start);
    if (cmp == "<") t.upper = Bound{*value, false};
    if (cmp == "<=") t.upper = Bound{*value, true};
    if (cmp == ">") t.lower = Bound{*value, false};
    if (cmp == ">=") t.lower = Bound{*value, true};
    if (cmp == "=") t.lower = t.upper = Bound{*value, true};
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Throws SyntaxError carrying the 0-based offset of the problem.
inline QueryAst parse_query(std::string_view text) {
  return detail::QueryParser(text).parse();
}

// Canonical text; parse_query(render_query(ast)) == ast for parsed queries.
inline std::string render_query(const QueryAst& ast) {
  std::vector<std::string> parts;
  for (const auto& term : ast.terms) {
    if (const auto* h = std::get_if<HasTerm>(&term)) {
      parts.push_back(std::string(h->expand ? "has~(" : "has(") + h->ingredient + ")");
    } else if (const auto* n = std::get_if<NutrientTerm>(&term)) {
      std::string key = detail::nutrient_display_name(n->key);
      if (n->basis == Basis::kPerServing) key += "@serving";
      if (n->lower && n->upper && *n->lower == *n->upper && n->lower->inclusive) {
        parts.push_back(key + "=" + text::format_number(n->lower->value));
        continue;
      }
      if (n->lower) {
        parts.push_back(key + (n->lower->inclusive ? ">=" : ">") +
                        text::format_number(n->lower->value));
      }
      if (n->upper) {
        parts.push_back(key + (n->upper->inclusive ? "<=" : "<") +
                        text::format_number(n->upper->value));
      }
    } else if (const auto* r = std::get_if<RegionTerm>(&term)) {
      std::string name = r->relation ? std::string(to_string(*r->relation)) : "region";
      parts.push_back(name + "=" + r->code);
    }
  }
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " AND ") + p;
  return out;
}

struct QueryResult {
  IdSet ids;
  // Recipes that satisfy every other predicate but have an unknown value for
  // a bounded nutrient.
  IdSet uncovered;
};

// Checks that every ingredient and nutrient key the query names exists.
inline void check_query(const QueryAst& ast, const GraphStore& store,
                        const NutrientTable& table) {
  for (const auto& term : ast.terms) {
    if (const auto* h = std::get_if<HasTerm>(&term)) {
      if (!store.ontology().contains(h->ingredient)) {
        throw Error(ErrorCode::kUnknownIngredient,
                    "unknown ingredient id '" + h->ingredient + "'", "query");
      }
    } else if (const auto* n = std::get_if<NutrientTerm>(&term)) {
      if (!table.has_key(n->key)) {
        throw Error(ErrorCode::kUnknownNutrient, "unknown nutrient key '" + n->key + "'",
                    "query");
      }
      if (!n->lower && !n->upper) {
        throw Error(ErrorCode::kInvalidArgument,
                    "nutrient predicate on '" + n->key + "' has no bound", "query");
      }
    }
  }
}

// Intersection of the per-predicate recipe sets.
inline QueryResult evaluate(const QueryAst& ast, const GraphStore& store,
                            const NutrientTable& table) {
  check_query(ast, store, table);
  std::vector<const IdSet*> index_sets;
  std::vector<IdSet> region_sets;
  std::vector<const NutrientTerm*> nutrient_terms;
  region_sets.reserve(ast.terms.size());
  for (const auto& term : ast.terms) {
    if (const auto* h = std::get_if<HasTerm>(&term)) {
      index_sets.push_back(&store.recipes_containing(h->ingredient, h->expand));
    } else if (const auto* r = std::get_if<RegionTerm>(&term)) {
      region_sets.push_back(store.recipes_in_region(r->code, r->relation));
      index_sets.push_back(&region_sets.back());
    } else {
      nutrient_terms.push_back(&std::get<NutrientTerm>(term));
    }
  }
  std::sort(index_sets.begin(), index_sets.end(),
            [](const IdSet* a, const IdSet* b) { return a->size() < b->size(); });

  IdSet candidates;
  if (index_sets.empty()) {
    candidates = store.ids();
  } else {
    candidates = *index_sets.front();
    for (std::size_t i = 1; i < index_sets.size() && !candidates.empty(); ++i) {
      IdSet next;
      std::set_intersection(candidates.begin(), candidates.end(), index_sets[i]->begin(),
                            index_sets[i]->end(), std::inserter(next, next.end()));
      candidates = std::move(next);
    }
  }

  QueryResult result;
  if (nutrient_terms.empty()) {
    result.ids = std::move(candidates);
    return result;
  }
  for (const auto& id : candidates) {
    const Recipe& recipe = store.get(id);
    NutrientProfile per_recipe = derive_recipe_profile(recipe, table);
    std::optional<NutrientProfile> serving;
    bool match = true;
    bool unknown = false;
    for (const NutrientTerm* t : nutrient_terms) {
      const NutrientProfile* p = &per_recipe;
      if (t->basis == Basis::kPerServing) {
        if (!serving) serving = per_serving(per_recipe, recipe.servings);
        p = &*serving;
      }
      if (!p->complete(t->key)) {
        unknown = true;
        continue;
      }
      if (!t->accepts(p->amounts.at(t->key))) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    if (unknown) {
      result.uncovered.insert(result.uncovered.end(), id);
    } else {
      result.ids.insert(result.ids.end(), id);
    }
  }
  return result;
}

// Subgraph of `result`: recipes, their ingredients, and for every expanded
// has-term the is-a chain from each matching ingredient up to the queried
// node. Queried nodes are marked. `result` must be a subset of
// evaluate(ast).
inline Subgraph explain(const QueryAst& ast, const IdSet& result, const GraphStore& store,
                        const NutrientTable& table) {
  QueryResult full = evaluate(ast, store, table);
  for (const auto& id : result) {
    if (!full.ids.count(id)) {
      throw Error(ErrorCode::kInconsistentResult,
                  "recipe '" + id + "' is not a result of the query", "result");
    }
  }
  IdSet marked;
  for (const auto& term : ast.terms) {
    if (const auto* h = std::get_if<HasTerm>(&term)) marked.insert(h->ingredient);
  }
  Subgraph g = store.export_subgraph(result, marked);
  const Ontology& onto = store.ontology();
  std::map<std::string, SubgraphNode> extra;
  std::set<std::pair<std::string, std::string>> is_a;
  std::set<std::string> present;
  for (const auto& n : g.nodes) {
    if (n.type == "ingredient") present.insert(n.id);
  }
  for (const auto& term : ast.terms) {
    const auto* h = std::get_if<HasTerm>(&term);
    if (!h || !h->expand) continue;
    for (const auto& id : result) {
      for (const auto& use : store.get(id).uses) {
        if (!onto.is_ancestor(h->ingredient, use.ingredient_id)) continue;
        for (std::string cur = use.ingredient_id; cur != h->ingredient;) {
          std::string parent = *onto.node(cur).parent;
          is_a.insert({cur, parent});
          if (!present.count(parent) && !extra.count(parent)) {
            const IngredientNode& p = onto.node(parent);
            extra[parent] = SubgraphNode{p.id, "class", p.name, marked.count(p.id) > 0};
          }
          cur = parent;
        }
      }
    }
  }
  for (auto& [id, node] : extra) g.nodes.push_back(std::move(node));
  std::sort(g.nodes.begin(), g.nodes.end(), [](const auto& a, const auto& b) {
    return std::tie(a.id, a.type) < std::tie(b.id, b.type);
  });
  for (const auto& [child, parent] : is_a) {
    SubgraphEdge e;
    e.source = child;
    e.target = parent;
    e.kind = "is_a";
    g.edges.push_back(std::move(e));
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.kind, a.source, a.target) < std::tie(b.kind, b.source, b.target);
  });
  return g;
}

}  // namespace fkg

#endif  // FKG_QUERY_HPP_
