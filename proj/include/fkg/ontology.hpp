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

// The ingredient ontology: a single-rooted is-a tree of abstract classes
// (dairy, meat) and concrete ingredients (cow's milk, chicken).
//
// Loaded from a comma-separated table
//
//   id,name,parent_id,kind,synonyms,density[,piece_grams]
//
// where `synonyms` is '|'-separated, an empty parent_id marks the root and
// `density` is grams per milliliter. A parent_id holding several '|'-separated
// ids keeps the first one and records a warning for the rest, so lca and depth
// stay unambiguous.
//
// The graph is immutable once built and safe for concurrent reads.

#ifndef FKG_ONTOLOGY_HPP_
#define FKG_ONTOLOGY_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fkg/error.hpp"
#include "fkg/text.hpp"

namespace fkg {

enum class NodeKind { kAbstract, kConcrete };

inline std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::kAbstract ? "abstract" : "concrete";
}

struct IngredientNode {
  std::string id;
  std::string name;
  std::vector<std::string> synonyms;  // sorted, unique
  NodeKind kind = NodeKind::kConcrete;
  std::optional<std::string> parent;  // empty only for the root
  std::optional<double> density;      // g/ml
  std::optional<double> piece_grams;  // mass of one piece

  bool operator==(const IngredientNode&) const = default;
};

class Ontology {
 public:
  Ontology() = default;

  // Validates and indexes `nodes`. Throws Error on duplicate ids, dangling
  // parents, cycles, a root count other than one, or concrete nodes with
  // children.
  static Ontology build(std::vector<IngredientNode> nodes,
                        std::vector<std::string> warnings = {}) {
    Ontology o;
    o.nodes_ = std::move(nodes);
    o.warnings_ = std::move(warnings);
    o.index();
    return o;
  }

  static Ontology parse_csv(std::string_view csv) {
    auto rows = text::parse_csv(csv);
    if (rows.empty()) {
      throw Error(ErrorCode::kEmptyInput, "ontology table is empty");
    }
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
      col[std::string(text::trim(rows[0][i]))] = i;
    }
    for (const char* required : {"id", "name", "parent_id", "kind"}) {
      if (!col.count(required)) {
        throw Error(ErrorCode::kInvalidArgument,
                    std::string("ontology header lacks column '") + required + "'",
                    "header");
      }
    }
    auto cell = [&](const std::vector<std::string>& row,
                    const char* name) -> std::string {
      auto it = col.find(name);
      if (it == col.end() || it->second >= row.size()) return {};
      return std::string(text::trim(row[it->second]));
    };
    auto number = [&](const std::string& s, std::size_t line,
                      const char* name) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      auto v = text::parse_decimal(s);
      if (!v || *v <= 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "line " + std::to_string(line) + ": " + name +
                        " must be a positive number, got '" + s + "'",
                    name);
      }
      return v;
    };

    std::vector<IngredientNode> nodes;
    std::vector<std::string> warnings;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      IngredientNode n;
      n.id = cell(row, "id");
      n.name = cell(row, "name");
      if (n.id.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "line " + std::to_string(r + 1) + ": empty id", "id");
      }
      if (n.name.empty()) n.name = n.id;
      std::string kind = text::to_lower(cell(row, "kind"));
      if (kind == "abstract") {
        n.kind = NodeKind::kAbstract;
      } else if (kind == "concrete") {
        n.kind = NodeKind::kConcrete;
      } else {
        throw Error(ErrorCode::kInvalidArgument,
                    "node " + n.id + ": kind must be abstract or concrete",
                    "kind");
      }
      std::string parents = cell(row, "parent_id");
      if (!parents.empty()) {
        auto ids = text::split(parents, '|');
        for (std::size_t i = 0; i < ids.size(); ++i) {
          std::string p(text::trim(ids[i]));
          if (p.empty()) continue;
          if (!n.parent) {
            n.parent = p;
          } else {
            warnings.push_back("node " + n.id + ": extra parent " + p +
                               " ignored (first parent " + *n.parent + " kept)");
          }
        }
      }
      std::string syn = cell(row, "synonyms");
      if (!syn.empty()) {
        for (auto& s : text::split(syn, '|')) {
          std::string t(text::trim(s));
          if (!t.empty()) n.synonyms.push_back(std::move(t));
        }
      }
      n.density = number(cell(row, "density"), r + 1, "density");
      n.piece_grams = number(cell(row, "piece_grams"), r + 1, "piece_grams");
      nodes.push_back(std::move(n));
    }
    return build(std::move(nodes), std::move(warnings));
  }

  std::string to_csv() const {
    std::ostringstream out;
    out << "id,name,parent_id,kind,synonyms,density,piece_grams\n";
    for (const auto& n : nodes_) {
      std::string syn;
      for (std::size_t i = 0; i < n.synonyms.size(); ++i) {
        if (i) syn += '|';
        syn += n.synonyms[i];
      }
      out << text::csv_escape(n.id) << ',' << text::csv_escape(n.name) << ','
          << text::csv_escape(n.parent.value_or("")) << ',' << to_string(n.kind)
          << ',' << text::csv_escape(syn) << ','
          << (n.density ? text::format_number(*n.density) : "") << ','
          << (n.piece_grams ? text::format_number(*n.piece_grams) : "") << '\n';
    }
    return out.str();
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<IngredientNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool contains(std::string_view id) const { return find_index(id).has_value(); }

  const IngredientNode* find(std::string_view id) const {
    auto i = find_index(id);
    return i ? &nodes_[*i] : nullptr;
  }

  const IngredientNode& node(std::string_view id) const {
    return nodes_[index_of(id)];
  }

  const IngredientNode& root() const { return nodes_.at(root_); }

  std::size_t depth(std::string_view id) const { return depth_[index_of(id)]; }

  std::vector<std::string> children(std::string_view id) const {
    std::vector<std::string> out;
    for (std::size_t c : children_[index_of(id)]) out.push_back(nodes_[c].id);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Node itself first, root last.
  std::vector<std::string> ancestors(std::string_view id) const {
    std::vector<std::string> out;
    for (std::size_t i = index_of(id);; i = parent_[i]) {
      out.push_back(nodes_[i].id);
      if (i == root_) break;
    }
    return out;
  }

  // True when `ancestor` lies on the path from `id` to the root (inclusive).
  bool is_ancestor(std::string_view ancestor, std::string_view id) const {
    std::size_t a = index_of(ancestor);
    std::size_t n = index_of(id);
    return tin_[a] <= tin_[n] && tin_[n] < tout_[a];
  }

  std::string lca(std::string_view a, std::string_view b) const {
    return nodes_[lca_index(index_of(a), index_of(b))].id;
  }

  std::size_t path_distance(std::string_view a, std::string_view b) const {
    std::size_t ia = index_of(a);
    std::size_t ib = index_of(b);
    std::size_t l = lca_index(ia, ib);
    return depth_[ia] + depth_[ib] - 2 * depth_[l];
  }

  // Wu-Palmer: 2 * depth(lca) / (depth(a) + depth(b)), with the root's
  // self-similarity defined as 1.
  double similarity(std::string_view a, std::string_view b) const {
    std::size_t ia = index_of(a);
    std::size_t ib = index_of(b);
    std::size_t sum = depth_[ia] + depth_[ib];
    if (sum == 0) return 1.0;
    return 2.0 * static_cast<double>(depth_[lca_index(ia, ib)]) /
           static_cast<double>(sum);
  }

  // Concrete nodes in the subtree of `id` (including `id`), sorted by id.
  std::vector<std::string> descendants(std::string_view id) const {
    std::size_t a = index_of(id);
    auto lo = std::lower_bound(concrete_by_tin_.begin(), concrete_by_tin_.end(),
                               tin_[a], [&](std::size_t n, std::size_t t) {
                                 return tin_[n] < t;
                               });
    std::vector<std::string> out;
    for (auto it = lo; it != concrete_by_tin_.end() && tin_[*it] < tout_[a]; ++it) {
      out.push_back(nodes_[*it].id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Depth-1 ancestor ("top-level class") of a node; the root maps to itself.
  std::string class_of(std::string_view id) const {
    std::size_t i = index_of(id);
    if (i == root_) return nodes_[i].id;
    while (parent_[i] != root_) i = parent_[i];
    return nodes_[i].id;
  }

  // Density of the node or its nearest ancestor that has one.
  std::optional<double> density_of(std::string_view id) const {
    for (std::size_t i = index_of(id);; i = parent_[i]) {
      if (nodes_[i].density) return nodes_[i].density;
      if (i == root_) return std::nullopt;
    }
  }

  std::optional<double> piece_grams_of(std::string_view id) const {
    for (std::size_t i = index_of(id);; i = parent_[i]) {
      if (nodes_[i].piece_grams) return nodes_[i].piece_grams;
      if (i == root_) return std::nullopt;
    }
  }

 private:
  std::optional<std::size_t> find_index(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view id) const {
    auto i = find_index(id);
    if (!i) {
      throw Error(ErrorCode::kUnknownIngredient,
                  "unknown ingredient id '" + std::string(id) + "'");
    }
    return *i;
  }

  std::size_t lca_index(std::size_t a, std::size_t b) const {
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    return a;
  }

  void index() {
    const std::size_t n = nodes_.size();
    if (n == 0) throw Error(ErrorCode::kEmptyInput, "ontology has no nodes");
    index_.clear();
    for (std::size_t i = 0; i < n; ++i) {
      auto& node = nodes_[i];
      std::sort(node.synonyms.begin(), node.synonyms.end());
      node.synonyms.erase(std::unique(node.synonyms.begin(), node.synonyms.end()),
                          node.synonyms.end());
      if (!index_.emplace(node.id, i).second) {
        throw Error(ErrorCode::kOntologyDuplicateId,
                    "duplicate ontology id '" + node.id + "'", node.id);
      }
    }

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    parent_.assign(n, kNone);
    for (std::size_t i = 0; i < n; ++i) {
      if (!nodes_[i].parent) continue;
      auto p = find_index(*nodes_[i].parent);
      if (!p) {
        throw Error(ErrorCode::kOntologyDanglingParent,
                    "node '" + nodes_[i].id + "' references missing parent '" +
                        *nodes_[i].parent + "'",
                    nodes_[i].id);
      }
      parent_[i] = *p;
    }

    // Cycle detection by walking parent chains; 0 = unseen, 1 = on the
    // current walk, 2 = known to terminate.
    std::vector<int> state(n, 0);
    for (std::size_t start = 0; start < n; ++start) {
      std::vector<std::size_t> walk;
      std::size_t i = start;
      while (i != kNone && state[i] == 0) {
        state[i] = 1;
        walk.push_back(i);
        i = parent_[i];
      }
      if (i != kNone && state[i] == 1) {
        std::vector<std::string> members;
        std::size_t j = i;
        do {
          members.push_back(nodes_[j].id);
          j = parent_[j];
        } while (j != i);
        std::sort(members.begin(), members.end());
        std::string joined;
        for (const auto& m : members) joined += (joined.empty() ? "" : ", ") + m;
        throw Error(ErrorCode::kOntologyCycle, "is-a cycle detected among: " + joined,
                    members.front());
      }
      for (std::size_t w : walk) state[w] = 2;
    }

    std::vector<std::string> roots;
    for (std::size_t i = 0; i < n; ++i) {
      if (parent_[i] == kNone) {
        roots.push_back(nodes_[i].id);
        root_ = i;
      }
    }
    if (roots.size() != 1) {
      std::string joined;
      for (const auto& r : roots) joined += (joined.empty() ? "" : ", ") + r;
      throw Error(ErrorCode::kOntologyRootCount,
                  roots.empty() ? "ontology has no root"
                                : "ontology has multiple roots: " + joined);
    }

    children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
      if (parent_[i] == kNone) continue;
      children_[parent_[i]].push_back(i);
      if (nodes_[parent_[i]].kind == NodeKind::kConcrete) {
        throw Error(ErrorCode::kOntologyInvalid,
                    "concrete node '" + nodes_[parent_[i]].id +
                        "' cannot have children ('" + nodes_[i].id + "')",
                    nodes_[parent_[i]].id);
      }
    }
    parent_[root_] = root_;

    // Iterative DFS assigning depth and Euler entry/exit times.
    depth_.assign(n, 0);
    tin_.assign(n, 0);
    tout_.assign(n, 0);
    std::size_t clock = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root_, 0}};
    tin_[root_] = clock++;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < children_[v].size()) {
        std::size_t c = children_[v][next++];
        depth_[c] = depth_[v] + 1;
        tin_[c] = clock++;
        stack.emplace_back(c, 0);
      } else {
        tout_[v] = clock;
        stack.pop_back();
      }
    }
    concrete_by_tin_.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (nodes_[i].kind == NodeKind::kConcrete) concrete_by_tin_.push_back(i);
    }
    std::sort(concrete_by_tin_.begin(), concrete_by_tin_.end(),
              [&](std::size_t x, std::size_t y) { return tin_[x] < tin_[y]; });
  }

  std::vector<IngredientNode> nodes_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> parent_;  // root points at itself
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> tin_;
  std::vector<std::size_t> tout_;
  std::vector<std::size_t> concrete_by_tin_;
  std::size_t root_ = 0;
};

}  // namespace fkg

#endif  // FKG_ONTOLOGY_HPP_
