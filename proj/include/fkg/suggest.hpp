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

// Instruction suggestion from co-occurrence counts.
//
// Training counts, over every step of every recipe,
//   (process verb, top-level class of each referenced ingredient)
//   (title token, process verb)
// and the number of steps seen.
//
// A candidate "VERB the INGREDIENT" scores
//
//   P(verb | class) * (1 + mean over title tokens of P(verb | token))
//
// with both conditionals Laplace-smoothed (alpha = 1) over occurrences per
// training recipe (count / recipe_count). Duplicating the corpus, or
// multiplying every count including recipe_count by a constant, therefore
// leaves every score bit-for-bit unchanged.

#ifndef FKG_SUGGEST_HPP_
#define FKG_SUGGEST_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/ontology.hpp"
#include "fkg/recipe.hpp"
#include "fkg/standardize.hpp"
#include "fkg/text.hpp"

namespace fkg {

inline constexpr std::string_view kSuggestModelFormat = "fkg-suggest-model/1";
inline constexpr double kSuggestAlpha = 1.0;

struct SuggestModel {
  std::map<std::pair<std::string, std::string>, std::uint64_t> template_counts;  // (verb, class)
  std::map<std::pair<std::string, std::string>, std::uint64_t> title_token_counts;  // (token, verb)
  std::uint64_t corpus_size = 0;   // training steps
  std::uint64_t recipe_count = 0;  // training recipes

  bool trained() const { return recipe_count > 0; }
  bool operator==(const SuggestModel&) const = default;

  // Candidate verbs: every trained process except "other".
  std::vector<std::string> verbs() const {
    std::set<std::string> v;
    for (const auto& [key, n] : template_counts) v.insert(key.first);
    for (const auto& [key, n] : title_token_counts) v.insert(key.second);
    v.erase(std::string(kOtherProcess));
    return {v.begin(), v.end()};
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = kSuggestModelFormat;
    j["corpus_size"] = corpus_size;
    j["recipe_count"] = recipe_count;
    j["template_counts"] = nlohmann::json::array();
    for (const auto& [key, n] : template_counts) {
      j["template_counts"].push_back({{"verb", key.first}, {"class", key.second}, {"count", n}});
    }
    j["title_token_counts"] = nlohmann::json::array();
    for (const auto& [key, n] : title_token_counts) {
      j["title_token_counts"].push_back(
          {{"token", key.first}, {"verb", key.second}, {"count", n}});
    }
    return j;
  }

  static SuggestModel from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& what) {
      throw Error(ErrorCode::kInvalidArgument, "suggest model: " + what, "model");
    };
    if (!j.is_object() || j.value("format", "") != kSuggestModelFormat) {
      fail("missing or unsupported format tag");
    }
    SuggestModel m;
    try {
      m.corpus_size = j.at("corpus_size").get<std::uint64_t>();
      m.recipe_count = j.at("recipe_count").get<std::uint64_t>();
      for (const auto& e : j.at("template_counts")) {
        m.template_counts[{e.at("verb").get<std::string>(), e.at("class").get<std::string>()}] =
            e.at("count").get<std::uint64_t>();
      }
      for (const auto& e : j.at("title_token_counts")) {
        m.title_token_counts[{e.at("token").get<std::string>(), e.at("verb").get<std::string>()}] =
            e.at("count").get<std::uint64_t>();
      }
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    return m;
  }
};

inline SuggestModel train(const std::vector<Recipe>& corpus, const Ontology& ontology) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot train on an empty corpus", "corpus");
  }
  SuggestModel m;
  for (const auto& recipe : corpus) {
    ++m.recipe_count;
    auto title = text::tokens(recipe.title);
    std::set<std::string> title_tokens(title.begin(), title.end());
    for (const auto& step : recipe.steps) {
      ++m.corpus_size;
      std::string verb = step.process.empty() ? std::string(kOtherProcess) : step.process;
      for (const auto& id : step.ingredients) {
        ++m.template_counts[{verb, ontology.class_of(id)}];
      }
      for (const auto& t : title_tokens) ++m.title_token_counts[{t, verb}];
    }
  }
  return m;
}

struct StepSuggestion {
  std::string text;  // "VERB the NAME"
  std::string verb;
  std::string ingredient_id;
  double score = 0.0;
};

// Top-k (verb, ingredient) candidates for the given ingredients, by score and
// then by rendered text.
inline std::vector<StepSuggestion> suggest_steps(std::string_view title,
                                                 const std::vector<std::string>& ingredients,
                                                 std::size_t k, const SuggestModel& model,
                                                 const Ontology& ontology) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1", "k");
  if (!model.trained()) {
    throw Error(ErrorCode::kUntrainedModel, "suggestion model has not been trained", "model");
  }
  const std::vector<std::string> verbs = model.verbs();
  if (verbs.empty()) return {};
  const double v = static_cast<double>(verbs.size());
  const double recipes = static_cast<double>(model.recipe_count);

  std::map<std::string, std::map<std::string, double>> by_class;  // class -> verb -> n
  std::map<std::string, double> class_totals;
  for (const auto& [key, n] : model.template_counts) {
    if (key.first == kOtherProcess) continue;
    double per_recipe = static_cast<double>(n) / recipes;
    by_class[key.second][key.first] += per_recipe;
    class_totals[key.second] += per_recipe;
  }
  std::map<std::string, std::map<std::string, double>> by_token;  // token -> verb -> n
  std::map<std::string, double> token_totals;
  for (const auto& [key, n] : model.title_token_counts) {
    if (key.second == kOtherProcess) continue;
    double per_recipe = static_cast<double>(n) / recipes;
    by_token[key.first][key.second] += per_recipe;
    token_totals[key.first] += per_recipe;
  }
  auto smoothed = [&](const auto& table, const auto& totals, const std::string& key,
                      const std::string& verb) {
    double n = 0.0;
    double total = 0.0;
    if (auto it = table.find(key); it != table.end()) {
      if (auto jt = it->second.find(verb); jt != it->second.end()) n = jt->second;
      total = totals.at(key);
    }
    return (n + kSuggestAlpha) / (total + kSuggestAlpha * v);
  };

  auto title_tokens = text::tokens(title);
  std::set<std::string> tokens(title_tokens.begin(), title_tokens.end());
  std::map<std::string, double> affinity;
  for (const auto& verb : verbs) {
    if (tokens.empty()) {
      affinity[verb] = 1.0 / v;
      continue;
    }
    double sum = 0.0;
    for (const auto& t : tokens) sum += smoothed(by_token, token_totals, t, verb);
    affinity[verb] = sum / static_cast<double>(tokens.size());
  }

  std::vector<StepSuggestion> out;
  std::set<std::string> seen;
  for (const auto& id : ingredients) {
    if (!seen.insert(id).second) continue;
    const IngredientNode& node = ontology.node(id);
    std::string cls = ontology.class_of(id);
    for (const auto& verb : verbs) {
      double score = smoothed(by_class, class_totals, cls, verb) * (1.0 + affinity[verb]);
      out.push_back({verb + " the " + node.name, verb, id, score});
    }
  }
  std::sort(out.begin(), out.end(), [](const StepSuggestion& a, const StepSuggestion& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace fkg

#endif  // FKG_SUGGEST_HPP_
