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

// HTTP/JSON front end over an Engine. Routes live under /v1; every failure
// is an ApiError document {"status", "code", "message", "field"}.

#ifndef FKG_SERVICE_HPP_
#define FKG_SERVICE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fkg/engine.hpp"
#include "fkg/error.hpp"
#include "fkg/nutrition.hpp"
#include "fkg/query.hpp"
#include "fkg/recipe.hpp"
#include "fkg/revisions.hpp"
#include "fkg/standardize.hpp"
#include "fkg/suggest.hpp"
#include "fkg/text.hpp"

namespace fkg {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kQuerySyntax:
    case ErrorCode::kUnknownNutrient:
      return 400;
    case ErrorCode::kUnknownIngredient:
    case ErrorCode::kUnknownRecipe:
      return 404;
    case ErrorCode::kStaleBase:
    case ErrorCode::kVersionConflict:
    case ErrorCode::kUntrainedModel:
      return 409;
    case ErrorCode::kOntologyCycle:
    case ErrorCode::kOntologyDuplicateId:
    case ErrorCode::kOntologyDanglingParent:
    case ErrorCode::kOntologyRootCount:
    case ErrorCode::kOntologyInvalid:
    case ErrorCode::kInvalidRecipe:
    case ErrorCode::kMissingDensity:
    case ErrorCode::kMissingPieceMass:
    case ErrorCode::kMissingReference:
    case ErrorCode::kEmptyCorpus:
      return 422;
    case ErrorCode::kInconsistentResult:
    case ErrorCode::kLogCorrupt:
    case ErrorCode::kIo:
      return 500;
  }
  return 500;
}

struct ApiError {
  int status = 500;
  std::string code;
  std::string message;
  std::string field;
  std::optional<std::size_t> position;  // query syntax errors only

  nlohmann::json to_json() const {
    nlohmann::json j{{"status", status}, {"code", code}, {"message", message}, {"field", field}};
    if (position) j["position"] = *position;
    return j;
  }
};

inline ApiError to_api_error(const Error& e) {
  ApiError a{http_status(e.code()), std::string(to_string(e.code())), e.what(), e.field(), {}};
  if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) a.position = s->position();
  return a;
}

class Service {
 public:
  explicit Service(Engine& engine) : engine_(engine) {}

  void mount(httplib::Server& server) {
    server.Get("/v1/health", wrap([this](const auto&, auto& res) {
      auto body = engine_.read([](const EngineState& s) {
        return nlohmann::json{{"status", "ok"},
                              {"seq", s.seq},
                              {"recipes", s.store.size()},
                              {"ontology_nodes", s.ontology->size()},
                              {"model_trained", s.model.trained()}};
      });
      reply(res, 200, body);
    }));

    server.Post("/v1/ontology", wrap([this](const auto& req, auto& res) {
      reply(res, 200, {{"nodes", engine_.load_ontology(req.body)}});
    }));

    server.Post("/v1/nutrition", wrap([this](const auto& req, auto& res) {
      reply(res, 200, {{"profiles", engine_.load_nutrition(req.body)}});
    }));

    server.Get("/v1/recipes", wrap([this](const auto&, auto& res) {
      auto ids = engine_.read([](const EngineState& s) { return s.store.ids(); });
      reply(res, 200, {{"ids", ids}});
    }));

    server.Post("/v1/recipes", wrap([this](const auto& req, auto& res) {
      Recipe r = recipe_from_json(parse_body(req), true);
      reply(res, 201, engine_.upsert_recipe(std::move(r)));
    }));

    server.Get("/v1/recipes/:id", wrap([this](const auto& req, auto& res) {
      std::string id = req.path_params.at("id");
      auto body = engine_.read([&](const EngineState& s) {
        const auto& e = s.store.entry(id);
        return nlohmann::json{{"version", e.version}, {"recipe", to_json(e.recipe)}};
      });
      reply(res, 200, body);
    }));

    server.Delete("/v1/recipes/:id", wrap([this](const auto& req, auto& res) {
      std::string id = req.path_params.at("id");
      engine_.delete_recipe(id);
      reply(res, 200, {{"deleted", id}});
    }));

    server.Get("/v1/recipes/:id/nutrition", wrap([this](const auto& req, auto& res) {
      std::string id = req.path_params.at("id");
      bool serving = parse_basis(req, "recipe");
      auto body = engine_.read([&](const EngineState& s) {
        return to_json(profile_for(s, s.store.get(id), serving));
      });
      reply(res, 200, body);
    }));

    server.Get("/v1/recipes/:id/radar", wrap([this](const auto& req, auto& res) {
      std::string id = req.path_params.at("id");
      bool serving = parse_basis(req, "serving");
      auto body = engine_.read([&](const EngineState& s) {
        return radar_json(s, s.store.get(id), serving);
      });
      reply(res, 200, body);
    }));

    // Radar preview for an unsaved draft: {"recipe": {...}, "basis": "serving"}.
    server.Post("/v1/radar", wrap([this](const auto& req, auto& res) {
      nlohmann::json j = parse_body(req);
      if (!j.contains("recipe")) {
        throw Error(ErrorCode::kInvalidArgument, "body needs a recipe", "recipe");
      }
      std::string basis = j.value("basis", "serving");
      if (basis != "serving" && basis != "recipe") {
        throw Error(ErrorCode::kInvalidArgument, "basis must be serving or recipe", "basis");
      }
      Recipe draft = recipe_from_json(j["recipe"], true);
      auto body = engine_.read([&](const EngineState& s) {
        for (std::size_t i = 0; i < draft.uses.size(); ++i) {
          auto& u = draft.uses[i];
          if (u.grams < 0) u.grams = resolve_grams(u.quantity, u.unit, u.ingredient_id, *s.ontology);
        }
        s.store.validate(draft);
        return radar_json(s, draft, basis == "serving");
      });
      reply(res, 200, body);
    }));

    server.Get("/v1/recipes/:id/lineage", wrap([this](const auto& req, auto& res) {
      std::string id = req.path_params.at("id");
      auto body = engine_.read([&](const EngineState& s) {
        if (!s.store.contains(id) && !s.revisions.knows(id)) {
          throw Error(ErrorCode::kUnknownRecipe, "unknown recipe id '" + id + "'", "id");
        }
        nlohmann::json j{{"id", id}, {"chain", s.revisions.chain(id)}};
        j["revisions"] = nlohmann::json::array();
        for (const auto& rid : s.revisions.chain(id)) {
          const Lineage* l = s.revisions.lineage(rid);
          if (!l) continue;
          j["revisions"].push_back(
              {{"lineage", to_json(*l)}, {"script", to_json(s.revisions.script(l->script_id))}});
        }
        return j;
      });
      reply(res, 200, body);
    }));

    // {"recipe": {...}, "base_version": n}
    server.Post("/v1/recipes/:id/revise", wrap([this](const auto& req, auto& res) {
      std::string id = req.path_params.at("id");
      nlohmann::json j = parse_body(req);
      if (!j.contains("recipe")) {
        throw Error(ErrorCode::kInvalidArgument, "body needs the edited recipe", "recipe");
      }
      std::optional<std::uint64_t> base_version;
      if (j.contains("base_version") && !j["base_version"].is_null()) {
        if (!j["base_version"].is_number_unsigned()) {
          throw Error(ErrorCode::kInvalidArgument, "base_version must be a non-negative integer",
                      "base_version");
        }
        base_version = j["base_version"].get<std::uint64_t>();
      }
      Recipe edited = recipe_from_json(j["recipe"], true);
      reply(res, 201, engine_.revise(id, std::move(edited), base_version));
    }));

    // {"query": "...", "subgraph": bool, "format": "json" | "dot"}
    server.Post("/v1/query", wrap([this](const auto& req, auto& res) {
      nlohmann::json j = parse_body(req);
      if (!j.contains("query") || !j["query"].is_string()) {
        throw Error(ErrorCode::kInvalidArgument, "body needs a query string", "query");
      }
      bool subgraph = j.value("subgraph", false);
      std::string format = j.value("format", "json");
      QueryAst ast = parse_query(j["query"].get<std::string>());
      auto body = engine_.read([&](const EngineState& s) {
        QueryResult r = evaluate(ast, s.store, s.nutrients);
        nlohmann::json out{{"query", render_query(ast)},
                           {"ids", r.ids},
                           {"uncovered", r.uncovered}};
        if (subgraph) {
          Subgraph g = explain(ast, r.ids, s.store, s.nutrients);
          if (format == "dot") {
            out["subgraph"] = g.to_dot();
          } else {
            out["subgraph"] = g.to_json();
          }
        }
        return out;
      });
      reply(res, 200, body);
    }));

    server.Get("/v1/nearest", wrap([this](const auto& req, auto& res) {
      RecipeSketch sketch;
      if (req.has_param("ids")) {
        for (auto& id : text::split(req.get_param_value("ids"), ',')) {
          std::string t(text::trim(id));
          if (!t.empty()) sketch.ingredients.push_back(t);
        }
      }
      sketch.title = req.has_param("title") ? req.get_param_value("title") : "";
      std::size_t k = req.has_param("k") ? parse_count(req.get_param_value("k"), "k") : 5;
      auto body = engine_.read([&](const EngineState& s) {
        nlohmann::json hits = nlohmann::json::array();
        for (const auto& h : nearest(sketch, k, s.store)) {
          hits.push_back({{"id", h.recipe_id},
                          {"score", h.score},
                          {"ingredient_score", h.ingredient_score},
                          {"title_score", h.title_score}});
        }
        return nlohmann::json{{"hits", hits}};
      });
      reply(res, 200, body);
    }));

    // {"title": "...", "ingredients": [ids], "k": n}
    server.Post("/v1/suggest", wrap([this](const auto& req, auto& res) {
      nlohmann::json j = parse_body(req);
      std::string title = j.value("title", "");
      std::vector<std::string> ingredients;
      if (auto it = j.find("ingredients"); it != j.end()) {
        if (!it->is_array()) {
          throw Error(ErrorCode::kInvalidArgument, "ingredients must be an array", "ingredients");
        }
        for (const auto& v : *it) {
          if (!v.is_string()) {
            throw Error(ErrorCode::kInvalidArgument, "ingredient ids must be strings",
                        "ingredients");
          }
          ingredients.push_back(v.get<std::string>());
        }
      }
      std::size_t k = 5;
      if (j.contains("k")) {
        if (!j["k"].is_number_integer() || j["k"].get<long long>() < 1) {
          throw Error(ErrorCode::kInvalidArgument, "k must be an integer >= 1", "k");
        }
        k = j["k"].get<std::size_t>();
      }
      auto body = engine_.read([&](const EngineState& s) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& sug : suggest_steps(title, ingredients, k, s.model, *s.ontology)) {
          out.push_back({{"text", sug.text},
                         {"verb", sug.verb},
                         {"ingredient_id", sug.ingredient_id},
                         {"score", sug.score}});
        }
        return nlohmann::json{{"suggestions", out}};
      });
      reply(res, 200, body);
    }));

    server.Post("/v1/suggest/train", wrap([this](const auto&, auto& res) {
      reply(res, 200, engine_.train_model());
    }));

    // {"title": "...", "ingredients": [lines], "steps": [sentences]} or
    // {"text": "..."} with a blank line between ingredient lines and steps.
    server.Post("/v1/standardize", wrap([this](const auto& req, auto& res) {
      nlohmann::json j = parse_body(req);
      RawRecipe raw = j.contains("text") ? raw_recipe_from_text(j) : raw_recipe_from_json(j);
      auto body = engine_.read([&](const EngineState& s) {
        return standardize_recipe(raw, *s.ontology).to_json();
      });
      reply(res, 200, body);
    }));
  }

  // Plain text form: first line title, then ingredient lines, a blank line,
  // then one step per line.
  static RawRecipe raw_recipe_from_text(const nlohmann::json& j) {
    if (!j["text"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "text must be a string", "text");
    }
    RawRecipe raw;
    std::vector<std::string> lines = text::split(j["text"].get<std::string>(), '\n');
    std::size_t i = 0;
    auto skip_blank = [&] {
      while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    };
    skip_blank();
    if (i < lines.size()) raw.title = std::string(text::trim(lines[i++]));
    skip_blank();
    for (; i < lines.size() && !text::trim(lines[i]).empty(); ++i) {
      raw.ingredients.emplace_back(text::trim(lines[i]));
    }
    for (; i < lines.size(); ++i) {
      if (!text::trim(lines[i]).empty()) raw.steps.emplace_back(text::trim(lines[i]));
    }
    return raw;
  }

 private:
  template <typename F>
  static httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        ApiError a = to_api_error(e);
        reply(res, a.status, a.to_json());
      } catch (const nlohmann::json::exception& e) {
        ApiError a{400, std::string(to_string(ErrorCode::kInvalidArgument)), e.what(), "body", {}};
        reply(res, a.status, a.to_json());
      } catch (const std::exception& e) {
        ApiError a{500, "internal", e.what(), "", {}};
        reply(res, a.status, a.to_json());
      }
    };
  }

  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    nlohmann::json j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::kInvalidArgument, "body must be a JSON object", "body");
    }
    return j;
  }

  static std::size_t parse_count(const std::string& s, const std::string& field) {
    auto v = text::parse_decimal(s);
    if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      throw Error(ErrorCode::kInvalidArgument, field + " must be an integer >= 1", field);
    }
    return static_cast<std::size_t>(*v);
  }

  // True for a per-serving basis.
  static bool parse_basis(const httplib::Request& req, const std::string& fallback) {
    std::string basis = req.has_param("basis") ? req.get_param_value("basis") : fallback;
    if (basis != "serving" && basis != "recipe") {
      throw Error(ErrorCode::kInvalidArgument, "basis must be serving or recipe", "basis");
    }
    return basis == "serving";
  }

  static NutrientProfile profile_for(const EngineState& s, const Recipe& r, bool serving) {
    NutrientProfile p = derive_recipe_profile(r, s.nutrients);
    return serving ? per_serving(p, r.servings) : p;
  }

  nlohmann::json radar_json(const EngineState& s, const Recipe& r, bool serving) const {
    NutrientProfile p = profile_for(s, r, serving);
    const auto& ref = engine_.options().reference_intakes;
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : radar_axes(p, ref)) {
      axes.push_back({{"key", a.key},
                      {"ratio", a.ratio},
                      {"amount", p.amounts.at(a.key)},
                      {"reference", ref.at(a.key)},
                      {"complete", a.complete}});
    }
    return {{"basis", to_string(p.basis)}, {"axes", axes}};
  }

  Engine& engine_;
};

}  // namespace fkg

#endif  // FKG_SERVICE_HPP_
