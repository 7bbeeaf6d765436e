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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fkg/error.hpp"
#include "fkg/standardize.hpp"
#include "support.hpp"

namespace fkg {
namespace {

using testing::fixture_json;
using testing::fixture_ontology;

std::optional<Unit> expected_unit(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return unit_from_string(j.get<std::string>());
}

TEST(IngredientLine, CorpusFieldAccuracy) {
  for (const auto& c : fixture_json("ingredient_lines.json")) {
    std::string line = c["line"];
    ParsedLine p = parse_ingredient_line(line);
    if (c["quantity"].is_null()) {
      EXPECT_FALSE(p.quantity) << line;
    } else {
      ASSERT_TRUE(p.quantity) << line;
      EXPECT_DOUBLE_EQ(*p.quantity, c["quantity"].get<double>()) << line;
    }
    EXPECT_EQ(p.unit, expected_unit(c["unit"])) << line;
    EXPECT_EQ(p.name, c["name"].get<std::string>()) << line;
    EXPECT_EQ(p.note, c["note"].get<std::string>()) << line;
  }
}

TEST(IngredientLine, Examples) {
  auto p = parse_ingredient_line("2 cups milk");
  EXPECT_EQ(p.quantity, 2.0);
  EXPECT_EQ(p.unit, Unit::kCup);
  EXPECT_EQ(p.name, "milk");
  p = parse_ingredient_line("1 1/2 tbsp of soy sauce, low sodium");
  EXPECT_EQ(p.quantity, 1.5);
  EXPECT_EQ(p.unit, Unit::kTablespoon);
  EXPECT_EQ(p.name, "soy sauce");
  EXPECT_EQ(p.note, "low sodium");
  p = parse_ingredient_line("salt");
  EXPECT_FALSE(p.quantity);
  EXPECT_FALSE(p.unit);
  EXPECT_THROW(parse_ingredient_line("   "), Error);
  EXPECT_THROW(parse_ingredient_line("2, sifted"), Error);
  EXPECT_EQ(parse_ingredient_line("2 cups, sifted").name, "cups");
}

TEST(IngredientLine, RenderParseRoundTrip) {
  std::mt19937_64 rng(3);
  const char* names[] = {"milk", "soy sauce", "fresh pineapple", "garlic", "wheat flour"};
  const char* notes[] = {"", "chopped", "to taste", "cut into cubes"};
  for (int i = 0; i < 500; ++i) {
    ParsedLine p;
    int shape = std::uniform_int_distribution<int>(0, 2)(rng);
    if (shape >= 1) p.quantity = std::uniform_int_distribution<int>(1, 64)(rng) / 4.0;
    if (shape == 2) p.unit = static_cast<Unit>(std::uniform_int_distribution<int>(0, 5)(rng));
    p.name = names[std::uniform_int_distribution<int>(0, 4)(rng)];
    p.note = notes[std::uniform_int_distribution<int>(0, 3)(rng)];
    ASSERT_EQ(parse_ingredient_line(render_line(p)), p) << render_line(p);
  }
}

TEST(EntityResolution, Pipeline) {
  const Ontology& o = *fixture_ontology();
  auto r = resolve_entity("Milk", o);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->ingredient_id, "MILK");
  EXPECT_EQ(r->method, ResolutionMethod::kExact);
  EXPECT_EQ(r->confidence, 1.0);
  r = resolve_entity("ananas", o);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->ingredient_id, "B1631-01");
  EXPECT_EQ(r->method, ResolutionMethod::kSynonym);
  r = resolve_entity("olive oyl", o);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->ingredient_id, "OLIVE");
  EXPECT_EQ(r->method, ResolutionMethod::kFuzzy);
  EXPECT_NEAR(r->confidence, 0.9 * (1 - 1.0 / 9), 1e-12);
  EXPECT_FALSE(resolve_entity("unobtainium", o));
  EXPECT_FALSE(resolve_entity("", o));
  // Abstract nodes resolve only when allowed.
  r = resolve_entity("pineapple", o);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->ingredient_id, "B1631");
  ResolveOptions concrete;
  concrete.concrete_only = true;
  r = resolve_entity("pineapple", o, concrete);
  ASSERT_TRUE(!r || o.node(r->ingredient_id).kind == NodeKind::kConcrete);
}

TEST(EntityResolution, FuzzyTiesGoToSmallestId) {
  auto o = Ontology::parse_csv(
      "id,name,parent_id,kind\nr,root,,abstract\nb,abcd,r,concrete\na,abce,r,concrete\n");
  auto res = resolve_entity("abcx", o);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->ingredient_id, "a");
}

TEST(EntityResolution, SynonymFixtureRate) {
  const Ontology& o = *fixture_ontology();
  int correct = 0;
  int total = 0;
  for (const auto& c : fixture_json("synonyms.json")) {
    auto r = resolve_entity(c["name"].get<std::string>(), o);
    ++total;
    correct += r && r->ingredient_id == c["id"].get<std::string>();
  }
  EXPECT_EQ(total, 40);
  EXPECT_GE(correct, 36);
}

TEST(Verbs, Inflections) {
  const auto& lex = default_lexicon();
  EXPECT_EQ(lex.match("frying"), "fry");
  EXPECT_EQ(lex.match("fries"), "fry");
  EXPECT_EQ(lex.match("baked"), "bake");
  EXPECT_EQ(lex.match("chopped"), "chop");
  EXPECT_EQ(lex.match("stirring"), "stir");
  EXPECT_EQ(lex.match("Mix"), "mix");
  EXPECT_FALSE(lex.match("serve"));
  auto custom = VerbLexicon::parse("# comment\n\nflambe\n");
  EXPECT_EQ(custom.verbs().size(), 1u);
}

TEST(Steps, ProcessAndMentions) {
  std::vector<KnownIngredient> known = {{"ONION", {"onion"}}, {"GARLIC", {"garlic", "garlic clove"}}};
  Step s = parse_step("Gently fry the garlic cloves, then add onions.", known);
  EXPECT_EQ(s.process, "fry");
  EXPECT_EQ(s.ingredients, (std::vector<std::string>{"GARLIC", "ONION"}));
  s = parse_step("Serve warm.", known);
  EXPECT_EQ(s.process, "other");
  EXPECT_TRUE(s.ingredients.empty());
  s = parse_step("Add the onionskin.", known);
  EXPECT_TRUE(s.ingredients.empty());
}

TEST(StandardizeRecipe, EndToEnd) {
  RawRecipe raw;
  raw.title = "Sweet and sour pork";
  raw.ingredients = {"400 g pork loin, cubed", "1 cup tinned pineapple", "2 tbsp ketchup",
                     "1 onion", "a pinch of unobtainium", ""};
  raw.steps = {"Fry the pork loin.", "Add the onion, tinned pineapple and ketchup and simmer."};
  auto s = standardize_recipe(raw, *fixture_ontology());
  ASSERT_EQ(s.draft.uses.size(), 4u);
  EXPECT_EQ(s.draft.uses[0].ingredient_id, "B1136-02");
  EXPECT_EQ(s.draft.uses[0].grams, 400);
  EXPECT_EQ(s.draft.uses[0].step_index, 0u);
  EXPECT_EQ(s.draft.uses[0].process, "fry");
  EXPECT_EQ(s.draft.uses[1].ingredient_id, "B1631-02");
  EXPECT_DOUBLE_EQ(s.draft.uses[1].grams, 240 * 0.9);
  EXPECT_EQ(s.draft.uses[1].step_index, 1u);
  EXPECT_EQ(s.draft.uses[3].ingredient_id, "ONION");
  EXPECT_DOUBLE_EQ(s.draft.uses[3].grams, 110);
  ASSERT_EQ(s.unresolved.size(), 1u);
  EXPECT_EQ(s.unresolved[0].line, 4u);
  EXPECT_EQ(s.unresolved[0].reason, "no-match");
  EXPECT_EQ(s.draft.steps[1].process, "add");
  EXPECT_EQ(s.provenance, (std::vector<std::size_t>{0, 1, 2, 3}));
  auto j = s.to_json();
  EXPECT_EQ(j["resolutions"].size(), 4u);
}

TEST(StandardizeRecipe, NothingParses) {
  RawRecipe raw;
  raw.ingredients = {"", "  "};
  try {
    standardize_recipe(raw, *fixture_ontology());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

}  // namespace
}  // namespace fkg
