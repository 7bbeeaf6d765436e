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

// fkg: command-line front end. State lives in --data-dir (journal plus
// snapshot); every subcommand replays it, acts, and prints JSON to stdout.
// Exit status: 0 ok, 1 domain error (ApiError JSON on stderr), 2 usage.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fkg/engine.hpp"
#include "fkg/error.hpp"
#include "fkg/query.hpp"
#include "fkg/recipe.hpp"
#include "fkg/revisions.hpp"
#include "fkg/service.hpp"
#include "fkg/standardize.hpp"
#include "fkg/suggest.hpp"

namespace {

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fkg::Error(fkg::ErrorCode::kIo, "cannot read " + path, "file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A JSON array of recipes, a single recipe object, or one object per line.
std::vector<nlohmann::json> read_recipe_docs(const std::string& body) {
  auto whole = nlohmann::json::parse(body, nullptr, false);
  if (!whole.is_discarded()) {
    if (whole.is_array()) return {whole.begin(), whole.end()};
    return {whole};
  }
  std::vector<nlohmann::json> docs;
  std::istringstream in(body);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (fkg::text::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw fkg::Error(fkg::ErrorCode::kInvalidArgument,
                       "line " + std::to_string(n) + " is not valid JSON", "recipes");
    }
    docs.push_back(std::move(j));
  }
  return docs;
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& part : fkg::text::split(s, ',')) {
    std::string t(fkg::text::trim(part));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fkg: food knowledge graph engine"};
  app.require_subcommand(1);
  std::string data_dir = "fkg-data";
  app.add_option("--data-dir", data_dir, "directory holding journal.log and snapshot.json");

  std::string file;
  auto* ingest_ontology = app.add_subcommand("ingest-ontology", "load an ontology CSV table");
  ingest_ontology->add_option("file", file, "CSV path, or - for stdin")->required();

  auto* ingest_nutrition = app.add_subcommand("ingest-nutrition", "load a per-100 g nutrient CSV");
  ingest_nutrition->add_option("file", file, "CSV path, or - for stdin")->required();

  auto* ingest_recipes = app.add_subcommand("ingest-recipes", "store recipes from JSON");
  ingest_recipes->add_option("file", file, "JSON array, object or JSON lines; - for stdin")
      ->required();

  std::string query_text;
  bool with_subgraph = false;
  std::string graph_format = "json";
  auto* query = app.add_subcommand("query", "evaluate a conjunctive query");
  query->add_option("query", query_text, "e.g. 'has~(B1136) AND has~(B1631)'")->required();
  query->add_flag("--subgraph", with_subgraph, "include the explanation subgraph");
  query->add_option("--format", graph_format, "subgraph format")
      ->check(CLI::IsMember({"json", "dot"}));

  std::string recipe_id;
  std::string basis = "recipe";
  auto* nutrition = app.add_subcommand("nutrition", "derived nutrient profile of a recipe");
  nutrition->add_option("recipe-id", recipe_id)->required();
  nutrition->add_option("--basis", basis)->check(CLI::IsMember({"recipe", "serving"}));

  std::string export_ids;
  bool export_state = false;
  auto* export_cmd = app.add_subcommand("export", "export recipes as a subgraph or full state");
  export_cmd->add_option("--ids", export_ids, "comma-separated recipe ids (default all)");
  export_cmd->add_option("--format", graph_format, "subgraph format")
      ->check(CLI::IsMember({"json", "dot"}));
  export_cmd->add_flag("--state", export_state, "print the canonical state snapshot instead");

  std::string title;
  std::string ingredient_ids;
  std::size_t k = 5;
  bool train_first = false;
  auto* suggest = app.add_subcommand("suggest", "suggest instruction steps");
  suggest->add_option("--title", title);
  suggest->add_option("--ingredients", ingredient_ids, "comma-separated ingredient ids");
  suggest->add_option("-k", k)->check(CLI::PositiveNumber);
  suggest->add_flag("--train", train_first, "retrain on the stored recipes first");

  auto* nearest_cmd = app.add_subcommand("nearest", "nearest stored recipes to a sketch");
  nearest_cmd->add_option("--title", title);
  nearest_cmd->add_option("--ingredients", ingredient_ids, "comma-separated ingredient ids");
  nearest_cmd->add_option("-k", k)->check(CLI::PositiveNumber);

  auto* standardize = app.add_subcommand("standardize", "standardize a raw recipe JSON document");
  standardize->add_option("file", file, "JSON path, or - for stdin")->required();

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    fkg::Engine engine;
    engine.open(data_dir);
    for (const auto& w : engine.warnings()) std::cerr << "warning: " << w << '\n';

    if (*ingest_ontology) {
      print({{"nodes", engine.load_ontology(read_file(file))}});
    } else if (*ingest_nutrition) {
      print({{"profiles", engine.load_nutrition(read_file(file))}});
    } else if (*ingest_recipes) {
      nlohmann::json out = nlohmann::json::array();
      for (const auto& doc : read_recipe_docs(read_file(file))) {
        out.push_back(engine.upsert_recipe(fkg::recipe_from_json(doc, true)));
      }
      print({{"stored", out}});
    } else if (*query) {
      fkg::QueryAst ast = fkg::parse_query(query_text);
      print(engine.read([&](const fkg::EngineState& s) {
        fkg::QueryResult r = fkg::evaluate(ast, s.store, s.nutrients);
        nlohmann::json out{{"query", fkg::render_query(ast)},
                           {"ids", r.ids},
                           {"uncovered", r.uncovered}};
        if (with_subgraph) {
          fkg::Subgraph g = fkg::explain(ast, r.ids, s.store, s.nutrients);
          out["subgraph"] = graph_format == "dot" ? nlohmann::json(g.to_dot()) : g.to_json();
        }
        return out;
      }));
    } else if (*nutrition) {
      print(engine.read([&](const fkg::EngineState& s) {
        const fkg::Recipe& r = s.store.get(recipe_id);
        fkg::NutrientProfile p = fkg::derive_recipe_profile(r, s.nutrients);
        if (basis == "serving") p = fkg::per_serving(p, r.servings);
        nlohmann::json out = fkg::to_json(p);
        out["recipe_id"] = recipe_id;
        return out;
      }));
    } else if (*export_cmd) {
      if (export_state) {
        print(engine.snapshot());
      } else {
        auto g = engine.read([&](const fkg::EngineState& s) {
          fkg::IdSet ids;
          if (export_ids.empty()) {
            ids = s.store.ids();
          } else {
            for (const auto& id : split_ids(export_ids)) {
              s.store.entry(id);
              ids.insert(id);
            }
          }
          return s.store.export_subgraph(ids);
        });
        if (graph_format == "dot") {
          std::cout << g.to_dot();
        } else {
          print(g.to_json());
        }
      }
    } else if (*suggest) {
      if (train_first) engine.train_model();
      print(engine.read([&](const fkg::EngineState& s) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& sug :
             fkg::suggest_steps(title, split_ids(ingredient_ids), k, s.model, *s.ontology)) {
          out.push_back({{"text", sug.text},
                         {"verb", sug.verb},
                         {"ingredient_id", sug.ingredient_id},
                         {"score", sug.score}});
        }
        return nlohmann::json{{"suggestions", out}};
      }));
    } else if (*nearest_cmd) {
      print(engine.read([&](const fkg::EngineState& s) {
        nlohmann::json hits = nlohmann::json::array();
        for (const auto& h :
             fkg::nearest({title, split_ids(ingredient_ids)}, k, s.store)) {
          hits.push_back({{"id", h.recipe_id}, {"score", h.score}});
        }
        return nlohmann::json{{"hits", hits}};
      }));
    } else if (*standardize) {
      auto doc = nlohmann::json::parse(read_file(file));
      fkg::RawRecipe raw = doc.contains("text") ? fkg::Service::raw_recipe_from_text(doc)
                                                : fkg::raw_recipe_from_json(doc);
      print(engine.read([&](const fkg::EngineState& s) {
        return fkg::standardize_recipe(raw, *s.ontology).to_json();
      }));
    } else if (*serve) {
      httplib::Server server;
      fkg::Service service(engine);
      service.mount(server);
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        throw fkg::Error(fkg::ErrorCode::kIo,
                         "cannot listen on " + host + ":" + std::to_string(port), "port");
      }
    }
  } catch (const fkg::Error& e) {
    std::cerr << fkg::to_api_error(e).to_json().dump() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << fkg::ApiError{400, "invalid_argument", e.what(), "input", {}}.to_json().dump()
              << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << fkg::ApiError{500, "io_error", e.what(), "data-dir", {}}.to_json().dump() << '\n';
    return 1;
  }
  return 0;
}
