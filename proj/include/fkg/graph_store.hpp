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

// The materialized food knowledge graph: recipe nodes linked to concrete
// ingredient nodes, with a containment index over every ingredient and all of
// its ontology ancestors.
//
// GraphStore is a plain value type with no internal locking; the service
// wraps it in a single-writer / multi-reader lock.

#ifndef FKG_GRAPH_STORE_HPP_
#define FKG_GRAPH_STORE_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/ontology.hpp"
#include "fkg/recipe.hpp"
#include "fkg/text.hpp"

namespace fkg {

// Random version-4 UUID in canonical 8-4-4-4-12 form.
inline std::string generate_uuid() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t hi = rng();
  std::uint64_t lo = rng();
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xFFFF),
                static_cast<unsigned>(hi & 0xFFFF), static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

using IdSet = std::set<std::string>;

struct SubgraphNode {
  std::string id;
  std::string type;  // "recipe", "ingredient" or "class"
  std::string label;
  bool marked = false;
};

// A "uses" edge runs recipe -> ingredient and carries the portion; an "is_a"
// edge runs child -> parent node and carries nothing else.
struct SubgraphEdge {
  std::string source;
  std::string target;
  double quantity = 0.0;
  Unit unit = Unit::kGram;
  double grams = 0.0;
  std::size_t step_index = 0;
  std::string process;
  std::string kind = "uses";
};

struct Subgraph {
  std::vector<SubgraphNode> nodes;  // sorted by (id, type)
  std::vector<SubgraphEdge> edges;  // sorted by (kind, source, target)

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : nodes) {
      j["nodes"].push_back(
          {{"id", n.id}, {"type", n.type}, {"label", n.label}, {"marked", n.marked}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges) {
      if (e.kind == "is_a") {
        j["edges"].push_back({{"kind", e.kind}, {"source", e.source}, {"target", e.target}});
        continue;
      }
      j["edges"].push_back({{"kind", e.kind},
                            {"source", e.source},
                            {"target", e.target},
                            {"quantity", e.quantity},
                            {"unit", to_string(e.unit)},
                            {"grams", e.grams},
                            {"step_index", e.step_index},
                            {"process", e.process}});
    }
    return j;
  }

  std::string to_dot() const {
    auto quote = [](std::string_view s) {
      std::string out = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
          out += "\\n";
          continue;
        }
        out.push_back(c);
      }
      return out + "\"";
    };
    std::ostringstream out;
    out << "digraph fkg {\n";
    for (const auto& n : nodes) {
      out << "  " << quote(n.id) << " [type=" << n.type << ", label=" << quote(n.label);
      if (n.marked) out << ", marked=true, style=bold";
      out << "];\n";
    }
    for (const auto& e : edges) {
      if (e.kind == "is_a") {
        out << "  " << quote(e.source) << " -> " << quote(e.target)
            << " [kind=is_a, style=dashed];\n";
        continue;
      }
      out << "  " << quote(e.source) << " -> " << quote(e.target)
          << " [kind=uses, quantity=" << text::format_number(e.quantity) << ", unit=" << to_string(e.unit)
          << ", grams=" << text::format_number(e.grams) << ", step=" << e.step_index
          << ", process=" << quote(e.process) << "];\n";
    }
    out << "}\n";
    return out.str();
  }
};

class GraphStore {
 public:
  struct Entry {
    Recipe recipe;
    std::uint64_t version = 0;
  };

  GraphStore() : ontology_(std::make_shared<const Ontology>()) {}
  explicit GraphStore(std::shared_ptr<const Ontology> ontology)
      : ontology_(std::move(ontology)) {}

  const Ontology& ontology() const { return *ontology_; }
  std::shared_ptr<const Ontology> ontology_ptr() const { return ontology_; }

  // Structural invariants plus: every use and step reference names a concrete
  // node of the bound ontology.
  void validate(const Recipe& r) const {
    validate_structure(r);
    for (std::size_t i = 0; i < r.uses.size(); ++i) {
      const auto& id = r.uses[i].ingredient_id;
      const IngredientNode* node = ontology_->find(id);
      std::string at = "uses[" + std::to_string(i) + "].ingredient_id";
      if (!node) {
        throw Error(ErrorCode::kUnknownIngredient, "unknown ingredient id '" + id + "'", at);
      }
      if (node->kind != NodeKind::kConcrete) {
        throw Error(ErrorCode::kInvalidRecipe,
                    "ingredient '" + id + "' is an abstract class, not a concrete ingredient",
                    at);
      }
    }
  }

  // Stores `r` (replacing any recipe with the same id) and returns its id.
  // An empty id is replaced by a fresh UUID.
  std::string upsert(Recipe r) {
    if (r.id.empty()) r.id = generate_uuid();
    normalize_regions(r.regions);
    validate(r);
    std::uint64_t version = 1;
    if (auto it = recipes_.find(r.id); it != recipes_.end()) {
      version = it->second.version + 1;
      unindex(it->second.recipe);
    }
    index(r);
    std::string id = r.id;
    recipes_[id] = Entry{std::move(r), version};
    ++generation_;
    return id;
  }

  // Restores an entry with an explicit version (snapshot loading).
  void restore(Recipe r, std::uint64_t version) {
    validate(r);
    if (auto it = recipes_.find(r.id); it != recipes_.end()) unindex(it->second.recipe);
    index(r);
    std::string id = r.id;
    recipes_[id] = Entry{std::move(r), version};
    ++generation_;
  }

  void erase(const std::string& id) {
    auto it = recipes_.find(id);
    if (it == recipes_.end()) {
      throw Error(ErrorCode::kUnknownRecipe, "unknown recipe id '" + id + "'", "id");
    }
    unindex(it->second.recipe);
    recipes_.erase(it);
    ++generation_;
  }

  // Swaps in a new ontology, revalidating every stored recipe against it and
  // rebuilding the index. Leaves the store untouched on failure.
  void rebind(std::shared_ptr<const Ontology> ontology) {
    GraphStore next(std::move(ontology));
    for (const auto& [id, e] : recipes_) next.restore(e.recipe, e.version);
    next.generation_ = generation_ + 1;
    *this = std::move(next);
  }

  bool contains(const std::string& id) const { return recipes_.count(id) > 0; }
  std::size_t size() const { return recipes_.size(); }
  bool empty() const { return recipes_.empty(); }
  // Bumped on every mutation.
  std::uint64_t generation() const { return generation_; }

  const Entry& entry(const std::string& id) const {
    auto it = recipes_.find(id);
    if (it == recipes_.end()) {
      throw Error(ErrorCode::kUnknownRecipe, "unknown recipe id '" + id + "'", "id");
    }
    return it->second;
  }

  const Recipe& get(const std::string& id) const { return entry(id).recipe; }
  std::uint64_t version(const std::string& id) const { return entry(id).version; }

  const std::map<std::string, Entry>& entries() const { return recipes_; }

  IdSet ids() const {
    IdSet out;
    for (const auto& [id, e] : recipes_) out.insert(out.end(), id);
    return out;
  }

  // Recipes using `ingredient` itself, or with `expand` any concrete node in
  // its subtree.
  const IdSet& recipes_containing(const std::string& ingredient, bool expand) const {
    if (!ontology_->contains(ingredient)) {
      throw Error(ErrorCode::kUnknownIngredient,
                  "unknown ingredient id '" + ingredient + "'", "ingredient");
    }
    const auto& idx = expand ? expanded_ : exact_;
    auto it = idx.find(ingredient);
    return it == idx.end() ? empty_set() : it->second;
  }

  // Recipes tagged with `code`, optionally restricted to one relation.
  IdSet recipes_in_region(const std::string& code,
                          std::optional<RegionRelation> relation = std::nullopt) const {
    IdSet out;
    auto it = regions_.find(code);
    if (it == regions_.end()) return out;
    for (const auto& [rel, ids] : it->second) {
      if (relation && rel != *relation) continue;
      out.insert(ids.begin(), ids.end());
    }
    return out;
  }

  // Recipes in `ids` plus all their ingredients, linked by their uses.
  // Ingredients in `marked` are flagged.
  Subgraph export_subgraph(const IdSet& ids, const IdSet& marked = {}) const {
    Subgraph g;
    std::map<std::pair<std::string, std::string>, SubgraphNode> nodes;
    for (const auto& id : ids) {
      const Recipe& r = get(id);
      nodes[{r.id, "recipe"}] = SubgraphNode{r.id, "recipe", r.title, false};
      for (const auto& u : r.uses) {
        const IngredientNode& n = ontology_->node(u.ingredient_id);
        nodes[{n.id, "ingredient"}] =
            SubgraphNode{n.id, "ingredient", n.name, marked.count(n.id) > 0};
        g.edges.push_back(SubgraphEdge{r.id, u.ingredient_id, u.quantity, u.unit, u.grams,
                                       u.step_index, u.process});
      }
    }
    for (auto& [key, node] : nodes) g.nodes.push_back(std::move(node));
    std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
      return std::tie(a.kind, a.source, a.target) < std::tie(b.kind, b.source, b.target);
    });
    return g;
  }

 private:
  static const IdSet& empty_set() {
    static const IdSet kEmpty;
    return kEmpty;
  }

  void index(const Recipe& r) {
    for (const auto& u : r.uses) {
      exact_[u.ingredient_id].insert(r.id);
      for (const auto& a : ontology_->ancestors(u.ingredient_id)) expanded_[a].insert(r.id);
    }
    for (const auto& t : r.regions) regions_[t.code][t.relation].insert(r.id);
  }

  void unindex(const Recipe& r) {
    auto drop = [&](auto& idx, const auto& key) {
      auto it = idx.find(key);
      if (it == idx.end()) return;
      it->second.erase(r.id);
      if (it->second.empty()) idx.erase(it);
    };
    for (const auto& u : r.uses) {
      drop(exact_, u.ingredient_id);
      for (const auto& a : ontology_->ancestors(u.ingredient_id)) drop(expanded_, a);
    }
    for (const auto& t : r.regions) {
      auto it = regions_.find(t.code);
      if (it == regions_.end()) continue;
      drop(it->second, t.relation);
      if (it->second.empty()) regions_.erase(it);
    }
  }

  std::shared_ptr<const Ontology> ontology_;
  std::map<std::string, Entry> recipes_;
  std::unordered_map<std::string, IdSet> exact_;
  std::unordered_map<std::string, IdSet> expanded_;
  std::map<std::string, std::map<RegionRelation, IdSet>> regions_;
  std::uint64_t generation_ = 0;
};

}  // namespace fkg

#endif  // FKG_GRAPH_STORE_HPP_
