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

// Recipe standardization: free-text ingredient lines and step sentences are
// turned into ontology entities and process verbs.
//
// The pipeline is parameterized by a Locale so other languages can plug in
// their own unit vocabulary; only English ships.

#ifndef FKG_STANDARDIZE_HPP_
#define FKG_STANDARDIZE_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/nutrition.hpp"
#include "fkg/ontology.hpp"
#include "fkg/recipe.hpp"
#include "fkg/text.hpp"

namespace fkg {

struct Locale {
  std::string code;
  std::map<std::string, Unit> unit_aliases;          // lowercase token -> unit
  std::map<Unit, std::string> unit_tokens;           // canonical rendering
  std::set<std::string> unit_connectors;             // "of" in "2 cups of milk"
};

inline const Locale& english_locale() {
  static const Locale kEnglish = [] {
    Locale l;
    l.code = "en";
    auto add = [&](Unit u, std::initializer_list<const char*> aliases) {
      for (const char* a : aliases) l.unit_aliases[a] = u;
    };
    add(Unit::kGram, {"g", "gram", "grams", "gr"});
    add(Unit::kMilliliter, {"ml", "milliliter", "milliliters", "millilitre", "millilitres"});
    add(Unit::kCup, {"cup", "cups", "c"});
    add(Unit::kTablespoon, {"tbsp", "tablespoon", "tablespoons", "tbs", "tbl"});
    add(Unit::kTeaspoon, {"tsp", "teaspoon", "teaspoons"});
    add(Unit::kPiece, {"piece", "pieces", "pc", "pcs"});
    l.unit_tokens = {{Unit::kGram, "g"},         {Unit::kMilliliter, "ml"},
                     {Unit::kCup, "cup"},        {Unit::kTablespoon, "tbsp"},
                     {Unit::kTeaspoon, "tsp"},   {Unit::kPiece, "piece"},
                     {Unit::kUnitless, "unitless"}};
    l.unit_connectors = {"of"};
    return l;
  }();
  return kEnglish;
}

// ---------------------------------------------------------------------------
// Ingredient lines

struct ParsedLine {
  std::optional<double> quantity;
  std::optional<Unit> unit;
  std::string name;
  std::string note;

  bool operator==(const ParsedLine&) const = default;
};

namespace detail {

// "3", "1.5", "1/2"; nullopt for anything else.
inline std::optional<double> parse_amount_token(std::string_view tok) {
  if (auto slash = tok.find('/'); slash != std::string_view::npos) {
    auto num = text::parse_decimal(tok.substr(0, slash));
    auto den = text::parse_decimal(tok.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    if (tok.substr(0, slash).find('.') != std::string_view::npos ||
        tok.substr(slash + 1).find('.') != std::string_view::npos) {
      return std::nullopt;
    }
    return *num / *den;
  }
  return text::parse_decimal(tok);
}

inline bool is_fraction_token(std::string_view tok) {
  return tok.find('/') != std::string_view::npos && parse_amount_token(tok).has_value();
}

inline std::string join(const std::vector<std::string>& parts, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < parts.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

}  // namespace detail

// Grammar: [quantity] [unit] name [, note]. Quantities accept integers,
// decimals, fractions and mixed fractions ("1 1/2"). A unit is recognized only
// after a quantity and only when a name follows it. The name is lowercased
// and whitespace-collapsed.
inline ParsedLine parse_ingredient_line(std::string_view line,
                                        const Locale& locale = english_locale()) {
  std::string_view body = text::trim(line);
  if (body.empty()) {
    throw Error(ErrorCode::kEmptyInput, "ingredient line is empty", "text");
  }
  ParsedLine out;
  std::string_view head = body;
  if (auto comma = body.find(','); comma != std::string_view::npos) {
    head = body.substr(0, comma);
    out.note = detail::join(text::words(body.substr(comma + 1)), 0);
  }
  auto toks = text::words(head);
  std::size_t i = 0;
  if (i < toks.size()) {
    if (auto q = detail::parse_amount_token(toks[i])) {
      out.quantity = *q;
      ++i;
      if (!detail::is_fraction_token(toks[0]) && i < toks.size() &&
          detail::is_fraction_token(toks[i])) {
        *out.quantity += *detail::parse_amount_token(toks[i]);
        ++i;
      }
    }
  }
  if (out.quantity && i + 1 < toks.size()) {
    auto it = locale.unit_aliases.find(text::to_lower(toks[i]));
    if (it != locale.unit_aliases.end()) {
      std::size_t after = i + 1;
      if (after + 1 < toks.size() && locale.unit_connectors.count(text::to_lower(toks[after]))) {
        ++after;
      }
      out.unit = it->second;
      i = after;
    }
  }
  out.name = text::to_lower(detail::join(toks, i));
  if (out.name.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "ingredient line '" + std::string(body) + "' has no ingredient name", "text");
  }
  return out;
}

// Canonical text for a parsed line; parse_ingredient_line inverts it.
inline std::string render_line(const ParsedLine& p, const Locale& locale = english_locale()) {
  std::string out;
  if (p.quantity) out += text::format_number(*p.quantity) + " ";
  if (p.quantity && p.unit) out += locale.unit_tokens.at(*p.unit) + " ";
  out += p.name;
  if (!p.note.empty()) out += ", " + p.note;
  return out;
}

// ---------------------------------------------------------------------------
// Entity resolution

enum class ResolutionMethod { kExact, kSynonym, kFuzzy };

inline std::string_view to_string(ResolutionMethod m) {
  switch (m) {
    case ResolutionMethod::kExact: return "exact";
    case ResolutionMethod::kSynonym: return "synonym";
    case ResolutionMethod::kFuzzy: return "fuzzy";
  }
  return "fuzzy";
}

struct EntityResolution {
  std::string ingredient_id;
  double confidence = 0.0;
  ResolutionMethod method = ResolutionMethod::kExact;

  bool operator==(const EntityResolution&) const = default;
};

struct ResolveOptions {
  // Upper bound on edit distance / longer length for a fuzzy match.
  double fuzzy_threshold = 0.25;
  bool concrete_only = false;
};

inline constexpr double kSynonymConfidence = 0.95;
inline constexpr double kFuzzyConfidenceScale = 0.9;

// Normalized labels of an ontology, prepared once for repeated resolution.
class EntityResolver {
 public:
  EntityResolver(const Ontology& ontology, ResolveOptions options = {})
      : options_(options) {
    for (const auto& n : ontology.nodes()) {
      if (options_.concrete_only && n.kind != NodeKind::kConcrete) continue;
      labels_.push_back({text::normalize(n.name), n.id, true});
      for (const auto& s : n.synonyms) labels_.push_back({text::normalize(s), n.id, false});
    }
    std::sort(labels_.begin(), labels_.end(), [](const Label& a, const Label& b) {
      return std::tie(a.id, a.text) < std::tie(b.id, b.text);
    });
  }

  // Exact canonical name, then synonym, then the fuzzy match with the lowest
  // normalized edit distance. Ties go to the lexicographically smallest id.
  std::optional<EntityResolution> resolve(std::string_view name) const {
    std::string key = text::normalize(name);
    if (key.empty()) return std::nullopt;
    for (const auto& l : labels_) {
      if (l.canonical && l.text == key) {
        return EntityResolution{l.id, 1.0, ResolutionMethod::kExact};
      }
    }
    for (const auto& l : labels_) {
      if (!l.canonical && l.text == key) {
        return EntityResolution{l.id, kSynonymConfidence, ResolutionMethod::kSynonym};
      }
    }
    const Label* best = nullptr;
    double best_distance = 2.0;
    for (const auto& l : labels_) {
      double d = text::normalized_edit_distance(key, l.text);
      if (d < best_distance) {
        best_distance = d;
        best = &l;
      }
    }
    if (!best || best_distance > options_.fuzzy_threshold) return std::nullopt;
    return EntityResolution{best->id, kFuzzyConfidenceScale * (1.0 - best_distance),
                            ResolutionMethod::kFuzzy};
  }

 private:
  struct Label {
    std::string text;
    std::string id;
    bool canonical;
  };
  ResolveOptions options_;
  std::vector<Label> labels_;  // sorted by id so first hit wins ties
};

inline std::optional<EntityResolution> resolve_entity(std::string_view name,
                                                      const Ontology& ontology,
                                                      ResolveOptions options = {}) {
  return EntityResolver(ontology, options).resolve(name);
}

// ---------------------------------------------------------------------------
// Steps

class VerbLexicon {
 public:
  VerbLexicon() = default;
  explicit VerbLexicon(std::set<std::string> verbs) : verbs_(std::move(verbs)) {}

  // One verb per line; blank lines and '#' comments are skipped.
  static VerbLexicon parse(std::string_view body) {
    std::set<std::string> verbs;
    for (const auto& line : text::split(body, '\n')) {
      std::string v = text::to_lower(text::trim(line));
      if (v.empty() || v[0] == '#') continue;
      verbs.insert(std::move(v));
    }
    return VerbLexicon(std::move(verbs));
  }

  // Returns the lexicon verb that `token` inflects, if any ("frying" -> fry,
  // "baked" -> bake, "chopped" -> chop).
  std::optional<std::string> match(std::string_view token) const {
    std::string t = text::to_lower(token);
    auto has = [&](const std::string& s) { return !s.empty() && verbs_.count(s) > 0; };
    if (has(t)) return t;
    auto strip = [&](std::string_view suffix) -> std::optional<std::string> {
      if (t.size() <= suffix.size() || t.compare(t.size() - suffix.size(), suffix.size(),
                                                  suffix) != 0) {
        return std::nullopt;
      }
      return t.substr(0, t.size() - suffix.size());
    };
    for (std::string_view suffix : {"s", "es", "ed", "d", "ing"}) {
      auto stem = strip(suffix);
      if (!stem) continue;
      if (has(*stem)) return *stem;
      if ((suffix == "ing" || suffix == "ed") && has(*stem + "e")) return *stem + "e";
      // chopped -> chop, stirring -> stir
      if ((suffix == "ing" || suffix == "ed") && stem->size() >= 2 &&
          (*stem)[stem->size() - 1] == (*stem)[stem->size() - 2]) {
        std::string shorter = stem->substr(0, stem->size() - 1);
        if (has(shorter)) return shorter;
      }
      // fries -> fry
      if (suffix == "es" && !stem->empty() && stem->back() == 'i') {
        std::string y = stem->substr(0, stem->size() - 1) + "y";
        if (has(y)) return y;
      }
    }
    return std::nullopt;
  }

  const std::set<std::string>& verbs() const { return verbs_; }

 private:
  std::set<std::string> verbs_;
};

inline const VerbLexicon& default_lexicon() {
  static const VerbLexicon kLexicon(std::set<std::string>{
      "add",   "bake",   "beat",  "blend",   "boil",  "braise", "chop",   "combine",
      "cut",   "dice",   "drain", "fry",     "grate", "grill",  "heat",   "knead",
      "marinate", "mash", "melt", "mince",   "mix",   "peel",   "pour",   "roast",
      "saute", "season", "simmer", "slice",  "steam", "stir",   "toss",   "whisk"});
  return kLexicon;
}

inline constexpr std::string_view kOtherProcess = "other";

struct KnownIngredient {
  std::string id;
  std::vector<std::string> names;  // any surface forms
};

namespace detail {

// Position of `needle` in `hay` starting at a word boundary and ending at a
// word boundary, optionally followed by a plural "s"/"es".
inline std::optional<std::size_t> find_mention(const std::string& hay,
                                               const std::string& needle) {
  if (needle.empty()) return std::nullopt;
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    bool start_ok = pos == 0 || hay[pos - 1] == ' ';
    std::size_t end = pos + needle.size();
    bool end_ok = end == hay.size() || hay[end] == ' ';
    for (std::string_view suffix : {"s", "es"}) {
      if (end_ok) break;
      if (hay.compare(end, suffix.size(), suffix) == 0) {
        std::size_t after = end + suffix.size();
        end_ok = after == hay.size() || hay[after] == ' ';
      }
    }
    if (start_ok && end_ok) return pos;
    ++pos;
  }
  return std::nullopt;
}

}  // namespace detail

// The first lexicon verb in the sentence becomes the process ("other" when
// none); ingredients are referenced in order of first mention.
inline Step parse_step(std::string_view sentence, const std::vector<KnownIngredient>& known,
                       const VerbLexicon& lexicon = default_lexicon()) {
  Step step;
  step.text = std::string(text::trim(sentence));
  std::string norm = text::normalize(sentence);
  step.process = std::string(kOtherProcess);
  for (const auto& tok : text::words(norm)) {
    if (auto verb = lexicon.match(tok)) {
      step.process = *verb;
      break;
    }
  }
  std::vector<std::pair<std::size_t, std::string>> hits;
  for (const auto& k : known) {
    std::optional<std::size_t> first;
    for (const auto& name : k.names) {
      auto p = detail::find_mention(norm, text::normalize(name));
      if (p && (!first || *p < *first)) first = p;
    }
    if (first) hits.emplace_back(*first, k.id);
  }
  std::sort(hits.begin(), hits.end());
  for (auto& [pos, id] : hits) {
    if (std::find(step.ingredients.begin(), step.ingredients.end(), id) ==
        step.ingredients.end()) {
      step.ingredients.push_back(std::move(id));
    }
  }
  return step;
}

// ---------------------------------------------------------------------------
// Whole recipes

struct RawRecipe {
  std::string title;
  std::vector<std::string> ingredients;
  std::vector<std::string> steps;
};

inline RawRecipe raw_recipe_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, field + ": " + what, field);
  };
  if (!j.is_object()) fail("recipe", "expected an object");
  RawRecipe raw;
  if (auto it = j.find("title"); it != j.end()) {
    if (!it->is_string()) fail("title", "expected a string");
    raw.title = it->get<std::string>();
  }
  for (const char* key : {"ingredients", "steps"}) {
    auto it = j.find(key);
    if (it == j.end()) continue;
    if (!it->is_array()) fail(key, "expected an array of strings");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) {
        fail(std::string(key) + "[" + std::to_string(i) + "]", "expected a string");
      }
      (std::string_view(key) == "ingredients" ? raw.ingredients : raw.steps)
          .push_back((*it)[i].get<std::string>());
    }
  }
  return raw;
}

struct UnresolvedMention {
  std::size_t line = 0;  // index into RawRecipe::ingredients
  std::string text;
  std::string reason;    // "unparsable", "no-match" or "duplicate"

  bool operator==(const UnresolvedMention&) const = default;
};

struct StandardizedRecipe {
  Recipe draft;
  std::vector<UnresolvedMention> unresolved;
  // provenance[i] is the ingredient line that produced draft.uses[i].
  std::vector<std::size_t> provenance;
  std::vector<EntityResolution> resolutions;  // parallel to draft.uses
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["draft"] = fkg::to_json(draft);
    j["unresolved"] = nlohmann::json::array();
    for (const auto& u : unresolved) {
      j["unresolved"].push_back({{"line", u.line}, {"text", u.text}, {"reason", u.reason}});
    }
    j["resolutions"] = nlohmann::json::array();
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
      j["resolutions"].push_back({{"line", provenance[i]},
                                  {"ingredient_id", resolutions[i].ingredient_id},
                                  {"confidence", resolutions[i].confidence},
                                  {"method", to_string(resolutions[i].method)}});
    }
    j["warnings"] = warnings;
    return j;
  }
};

// Parses and links every ingredient line, parses the steps against the
// resolved ingredients, and links each use to the first step mentioning it
// (step 0 otherwise). Lines that cannot be linked are reported, never dropped.
inline StandardizedRecipe standardize_recipe(const RawRecipe& raw, const Ontology& ontology,
                                             const VerbLexicon& lexicon = default_lexicon(),
                                             const Locale& locale = english_locale(),
                                             ResolveOptions options = {}) {
  options.concrete_only = true;
  EntityResolver resolver(ontology, options);
  StandardizedRecipe out;
  out.draft.title = raw.title;
  std::vector<KnownIngredient> known;
  std::size_t parsed_lines = 0;
  for (std::size_t i = 0; i < raw.ingredients.size(); ++i) {
    const std::string& line = raw.ingredients[i];
    ParsedLine parsed;
    try {
      parsed = parse_ingredient_line(line, locale);
    } catch (const Error&) {
      if (!text::trim(line).empty()) out.unresolved.push_back({i, line, "unparsable"});
      continue;
    }
    ++parsed_lines;
    auto res = resolver.resolve(parsed.name);
    if (!res) {
      out.unresolved.push_back({i, line, "no-match"});
      continue;
    }
    if (out.draft.find_use(res->ingredient_id)) {
      out.unresolved.push_back({i, line, "duplicate"});
      continue;
    }
    IngredientUse use;
    use.ingredient_id = res->ingredient_id;
    if (parsed.quantity) {
      use.quantity = *parsed.quantity;
      use.unit = parsed.unit.value_or(Unit::kUnitless);
      try {
        use.grams = resolve_grams(use.quantity, use.unit, use.ingredient_id, ontology);
      } catch (const Error& e) {
        use.grams = 0.0;
        out.warnings.push_back("line " + std::to_string(i) + ": " + e.what());
      }
    } else {
      use.quantity = 0.0;
      use.unit = Unit::kUnitless;
      use.grams = 0.0;
    }
    const IngredientNode& node = ontology.node(use.ingredient_id);
    KnownIngredient k{node.id, {node.name, parsed.name}};
    k.names.insert(k.names.end(), node.synonyms.begin(), node.synonyms.end());
    known.push_back(std::move(k));
    out.draft.uses.push_back(std::move(use));
    out.provenance.push_back(i);
    out.resolutions.push_back(*res);
  }
  if (parsed_lines == 0) {
    throw Error(ErrorCode::kEmptyInput, "no ingredient line could be parsed", "ingredients");
  }
  for (const auto& sentence : raw.steps) {
    if (text::trim(sentence).empty()) continue;
    out.draft.steps.push_back(parse_step(sentence, known, lexicon));
  }
  for (auto& use : out.draft.uses) {
    for (std::size_t s = 0; s < out.draft.steps.size(); ++s) {
      const auto& refs = out.draft.steps[s].ingredients;
      if (std::find(refs.begin(), refs.end(), use.ingredient_id) != refs.end()) {
        use.step_index = s;
        use.process = out.draft.steps[s].process;
        break;
      }
    }
  }
  return out;
}

}  // namespace fkg

#endif  // FKG_STANDARDIZE_HPP_
