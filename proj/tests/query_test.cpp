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

#include "fkg/query.hpp"

#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

namespace fkg {
namespace {

using testing::fixture_nutrients;
using testing::fixture_ontology;
using testing::fixture_store;
using testing::read_fixture;

struct Tables {
  oracle::RawTable raw = oracle::parse_nutrients(read_fixture("nutrients.csv"));
  std::set<std::string> keys = oracle::table_keys(read_fixture("nutrients.csv"));
};

const Tables& tables() {
  static Tables t;
  return t;
}

std::vector<std::string> all_node_ids(const Ontology& o) {
  std::vector<std::string> out;
  for (const auto& n : o.nodes()) out.push_back(n.id);
  return out;
}

TEST(QueryParse, PredicatesAndAliases) {
  auto ast = parse_query("has(B1136-02) AND has~(B1631) AND kcal@serving<=500 AND origin=CN");
  ASSERT_EQ(ast.terms.size(), 4u);
  EXPECT_EQ(std::get<HasTerm>(ast.terms[0]), (HasTerm{"B1136-02", false}));
  EXPECT_EQ(std::get<HasTerm>(ast.terms[1]), (HasTerm{"B1631", true}));
  const auto& n = std::get<NutrientTerm>(ast.terms[2]);
  EXPECT_EQ(n.key, "energy_kcal");
  EXPECT_EQ(n.basis, Basis::kPerServing);
  EXPECT_FALSE(n.lower);
  ASSERT_TRUE(n.upper);
  EXPECT_EQ(*n.upper, (Bound{500, true}));
  const auto& r = std::get<RegionTerm>(ast.terms[3]);
  EXPECT_EQ(r.code, "CN");
  EXPECT_EQ(r.relation, RegionRelation::kOrigin);

  auto eq = std::get<NutrientTerm>(parse_query("protein = 12.5").terms[0]);
  EXPECT_EQ(eq.key, "protein_g");
  EXPECT_EQ(eq.lower, (Bound{12.5, true}));
  EXPECT_EQ(eq.upper, (Bound{12.5, true}));

  EXPECT_TRUE(parse_query("").terms.empty());
  EXPECT_TRUE(parse_query("   ").terms.empty());
  EXPECT_FALSE(std::get<RegionTerm>(parse_query("region=JP").terms[0]).relation);
}

TEST(QueryParse, SyntaxErrorsCarryPosition) {
  struct Case {
    const char* text;
    std::size_t position;
  };
  const Case cases[] = {
      {"has(B1136", 9},
      {"has(B1136) OR has(B1631)", 11},
      {"has(B1136) AND", 14},
      {"kcal<<5", 5},
      {"kcal<abc", 5},
  };
  for (const auto& c : cases) {
    try {
      parse_query(c.text);
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const SyntaxError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kQuerySyntax);
      EXPECT_EQ(e.position(), c.position) << c.text << ": " << e.what();
    }
  }
}

TEST(QueryParse, RenderIsCanonical) {
  std::mt19937_64 rng(11);
  auto nodes = all_node_ids(*fixture_ontology());
  std::vector<std::string> keys(tables().keys.begin(), tables().keys.end());
  for (int i = 0; i < 300; ++i) {
    QueryAst ast = testing::random_ast(rng, nodes, keys);
    std::string text = render_query(ast);
    QueryAst back = parse_query(text);
    EXPECT_EQ(render_query(back), text);
    EXPECT_EQ(parse_query(render_query(back)), back);
  }
}

TEST(QueryEval, PorkAndPineapple) {
  GraphStore store = fixture_store();
  auto ast = parse_query("has~(B1136) AND has~(B1631)");
  QueryResult r = evaluate(ast, store, fixture_nutrients());
  EXPECT_EQ(r.ids, (IdSet{"r01", "r02", "r03"}));
  EXPECT_EQ(r.ids, oracle::scan_query(ast, store, tables().raw, tables().keys));
  EXPECT_TRUE(r.uncovered.empty());

  // Without expansion the abstract nodes match nothing.
  EXPECT_TRUE(evaluate(parse_query("has(B1136)"), store, fixture_nutrients()).ids.empty());
}

TEST(QueryEval, RegionPredicates) {
  GraphStore store = fixture_store();
  const auto& t = fixture_nutrients();
  EXPECT_EQ(evaluate(parse_query("origin=CN"), store, t).ids, (IdSet{"r01", "r06", "r12"}));
  EXPECT_EQ(evaluate(parse_query("popular=JP"), store, t).ids, (IdSet{"r01", "r12"}));
  EXPECT_EQ(evaluate(parse_query("region=US"), store, t).ids, (IdSet{"r02", "r07", "r08"}));
  EXPECT_EQ(evaluate(parse_query("has~(B1136) AND popular=JP"), store, t).ids,
            (IdSet{"r01", "r12"}));
}

TEST(QueryEval, UnknownNutrientValuesAreUncovered) {
  GraphStore store = fixture_store();
  auto ast = parse_query("has~(B1136) AND has~(B1631) AND kcal>=0");
  QueryResult r = evaluate(ast, store, fixture_nutrients());
  // r01 uses vinegar, which has no nutrient row.
  EXPECT_EQ(r.ids, (IdSet{"r02", "r03"}));
  EXPECT_EQ(r.uncovered, (IdSet{"r01"}));
  EXPECT_EQ(r.ids, oracle::scan_query(ast, store, tables().raw, tables().keys));
}

TEST(QueryEval, UnknownNamesAreRejected) {
  GraphStore store = fixture_store();
  const auto& t = fixture_nutrients();
  try {
    evaluate(parse_query("has(NOPE)"), store, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownIngredient);
  }
  try {
    evaluate(parse_query("sodium_mg<5"), store, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownNutrient);
  }
}

TEST(QueryEval, EmptyQueryMatchesEverything) {
  GraphStore store = fixture_store();
  EXPECT_EQ(evaluate(parse_query(""), store, fixture_nutrients()).ids, store.ids());
}

TEST(QueryEval, MatchesLinearScanOnRandomStores) {
  std::mt19937_64 rng(5);
  auto onto = fixture_ontology();
  auto pool = testing::concrete_ids(*onto);
  auto nodes = all_node_ids(*onto);
  std::vector<std::string> keys(tables().keys.begin(), tables().keys.end());
  GraphStore store(onto);
  for (int i = 0; i < 800; ++i) {
    store.upsert(testing::random_recipe(rng, pool, "q" + std::to_string(i)));
  }
  int nonempty = 0;
  for (int i = 0; i < 300; ++i) {
    QueryAst ast = testing::random_ast(rng, nodes, keys);
    QueryResult r = evaluate(ast, store, fixture_nutrients());
    ASSERT_EQ(r.ids, oracle::scan_query(ast, store, tables().raw, tables().keys))
        << render_query(ast);
    nonempty += !r.ids.empty();
  }
  EXPECT_GT(nonempty, 30);
}

TEST(QueryEval, ExpansionIsUnionOverDescendants) {
  GraphStore store = fixture_store();
  const Ontology& o = *fixture_ontology();
  for (const auto& n : o.nodes()) {
    if (n.kind != NodeKind::kAbstract) continue;
    IdSet expanded = evaluate(parse_query("has~(" + n.id + ")"), store, fixture_nutrients()).ids;
    IdSet united;
    for (const auto& d : o.descendants(n.id)) {
      auto part = evaluate(parse_query("has(" + d + ")"), store, fixture_nutrients()).ids;
      united.insert(part.begin(), part.end());
    }
    EXPECT_EQ(expanded, united) << n.id;
  }
}

TEST(QueryExplain, SubgraphTouchesQueriedClasses) {
  GraphStore store = fixture_store();
  auto ast = parse_query("has~(B1136) AND has~(B1631)");
  QueryResult r = evaluate(ast, store, fixture_nutrients());
  Subgraph g = explain(ast, r.ids, store, fixture_nutrients());

  std::map<std::string, SubgraphNode> nodes;
  for (const auto& n : g.nodes) nodes[n.id] = n;
  ASSERT_TRUE(nodes.count("B1136"));
  ASSERT_TRUE(nodes.count("B1631"));
  EXPECT_TRUE(nodes["B1136"].marked);
  EXPECT_TRUE(nodes["B1631"].marked);
  EXPECT_EQ(nodes["B1136"].type, "class");

  std::map<std::string, std::string> is_a;
  std::map<std::string, std::set<std::string>> uses;
  for (const auto& e : g.edges) {
    if (e.kind == "is_a") {
      is_a[e.source] = e.target;
    } else {
      uses[e.source].insert(e.target);
    }
  }
  // Every result reaches each marked class through one of its ingredients.
  for (const auto& id : r.ids) {
    for (const std::string cls : {"B1136", "B1631"}) {
      bool reached = false;
      for (const auto& ing : uses[id]) {
        for (std::string cur = ing; !reached;) {
          if (cur == cls) reached = true;
          auto it = is_a.find(cur);
          if (it == is_a.end()) break;
          cur = it->second;
        }
      }
      EXPECT_TRUE(reached) << id << " -> " << cls;
    }
  }
  EXPECT_NE(g.to_dot().find("[kind=is_a, style=dashed]"), std::string::npos);
}

TEST(QueryExplain, RejectsNonResults) {
  GraphStore store = fixture_store();
  auto ast = parse_query("has~(B1136) AND has~(B1631)");
  try {
    explain(ast, {"r01", "r07"}, store, fixture_nutrients());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentResult);
  }
  EXPECT_NO_THROW(explain(ast, {"r02"}, store, fixture_nutrients()));
}

}  // namespace
}  // namespace fkg
