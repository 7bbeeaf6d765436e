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

// The durable engine: ontology, nutrient table, recipe store, revision log
// and suggestion model behind one reader/writer lock.
//
// Every mutation is validated against the current state first, then appended
// to the journal, then applied. Once the append succeeded the apply step
// cannot fail, so each accepted mutation is logged exactly once and a
// rejected one never is. Replay runs the same apply step on each entry.
//
// Data directory layout:
//   journal.log     append-only mutation log
//   snapshot.json   state as of some sequence number (optional)

#ifndef FKG_ENGINE_HPP_
#define FKG_ENGINE_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"
#include "fkg/graph_store.hpp"
#include "fkg/journal.hpp"
#include "fkg/nutrition.hpp"
#include "fkg/ontology.hpp"
#include "fkg/recipe.hpp"
#include "fkg/revisions.hpp"
#include "fkg/suggest.hpp"

namespace fkg {

inline constexpr std::string_view kSnapshotFormat = "fkg-snapshot/1";

struct EngineOptions {
  // Write snapshot.json after this many appends since the last one; 0 never.
  std::uint64_t snapshot_every = 1000;
  std::map<std::string, double> reference_intakes = default_reference_intakes();
  std::function<std::int64_t()> clock = [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
  std::function<std::string()> id_source = generate_uuid;
};

struct EngineState {
  std::shared_ptr<const Ontology> ontology = std::make_shared<const Ontology>();
  NutrientTable nutrients;
  GraphStore store;
  RevisionLog revisions;
  SuggestModel model;
  std::uint64_t seq = 0;
};

class Engine {
 public:
  explicit Engine(EngineOptions options = {}) : options_(std::move(options)) {}
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Loads snapshot.json (if any) and replays the journal entries after it,
  // then keeps the journal open for appends. Throws kLogCorrupt on a damaged
  // log.
  void open(const std::filesystem::path& data_dir) {
    std::unique_lock lock(mu_);
    std::filesystem::create_directories(data_dir);
    EngineState next;
    auto snap_path = data_dir / "snapshot.json";
    if (std::filesystem::exists(snap_path)) {
      std::ifstream in(snap_path, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      auto j = nlohmann::json::parse(buf.str(), nullptr, false);
      if (j.is_discarded()) {
        throw Error(ErrorCode::kLogCorrupt, "snapshot.json is not valid JSON", "snapshot");
      }
      next = state_from_snapshot(j);
    }
    auto entries = journal_.open(data_dir / "journal.log");
    if (journal_.dropped_torn_tail()) {
      warnings_.push_back("journal ended in a torn entry; it was discarded");
    }
    if (!entries.empty() && next.seq > entries.back().seq) {
      throw Error(ErrorCode::kLogCorrupt, "snapshot is newer than the journal", "snapshot");
    }
    for (const auto& e : entries) {
      if (e.seq <= next.seq) continue;
      try {
        apply_entry(next, e);
      } catch (const Error& err) {
        throw Error(ErrorCode::kLogCorrupt,
                    "replay of entry " + std::to_string(e.seq) + " failed: " + err.what(),
                    "journal");
      }
      next.seq = e.seq;
    }
    if (journal_.last_seq() < next.seq) journal_.set_last_seq(next.seq);
    state_ = std::move(next);
    data_dir_ = data_dir;
    since_snapshot_ = 0;
  }

  bool durable() const { return !data_dir_.empty(); }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const EngineOptions& options() const { return options_; }

  // Runs `f(const EngineState&)` under a shared lock.
  template <typename F>
  auto read(F&& f) const {
    std::shared_lock lock(mu_);
    return f(static_cast<const EngineState&>(state_));
  }

  // ---- mutations -----------------------------------------------------------

  // Returns the number of nodes loaded.
  std::size_t load_ontology(const std::string& csv) {
    return mutate(EntryKind::kOntologyLoad, [&](const EngineState& s) {
      Ontology parsed = Ontology::parse_csv(csv);
      s.nutrients.check_against(parsed);
      GraphStore store = s.store;
      store.rebind(std::make_shared<const Ontology>(parsed));
      return nlohmann::json{{"csv", csv}};
    }).at("nodes").get<std::size_t>();
  }

  // Returns the number of profiles loaded.
  std::size_t load_nutrition(const std::string& csv) {
    return mutate(EntryKind::kNutritionLoad, [&](const EngineState& s) {
      NutrientTable::parse_csv(csv, *s.ontology);
      return nlohmann::json{{"csv", csv}};
    }).at("profiles").get<std::size_t>();
  }

  // Stores a recipe; a use without grams gets them from quantity and unit.
  // Returns {"id", "version"}.
  nlohmann::json upsert_recipe(Recipe r) {
    return mutate(EntryKind::kRecipeUpsert, [&](const EngineState& s) {
      if (r.id.empty()) r.id = options_.id_source();
      for (std::size_t i = 0; i < r.uses.size(); ++i) {
        auto& use = r.uses[i];
        if (use.grams >= 0) continue;
        try {
          use.grams = resolve_grams(use.quantity, use.unit, use.ingredient_id, *s.ontology);
        } catch (const Error& e) {
          throw Error(e.code(), e.what(), "uses[" + std::to_string(i) + "].grams");
        }
      }
      normalize_regions(r.regions);
      r.lineage.reset();
      if (s.store.contains(r.id)) r.lineage = s.store.get(r.id).lineage;
      s.store.validate(r);
      return nlohmann::json{{"recipe", to_json(r)}};
    });
  }

  void delete_recipe(const std::string& id) {
    mutate(EntryKind::kRecipeDelete, [&](const EngineState& s) {
      s.store.entry(id);
      return nlohmann::json{{"id", id}};
    });
  }

  // Stores `edited` as a new revision of `base_id`. Returns
  // {"id", "version", "lineage", "script"}.
  nlohmann::json revise(const std::string& base_id, Recipe edited,
                        std::optional<std::uint64_t> base_version) {
    return mutate(EntryKind::kRevision, [&](const EngineState& s) {
      std::string new_id = options_.id_source();
      std::string script_id = options_.id_source();
      std::int64_t timestamp = options_.clock();
      for (auto& use : edited.uses) {
        if (use.grams < 0) {
          use.grams = resolve_grams(use.quantity, use.unit, use.ingredient_id, *s.ontology);
        }
      }
      edited.id = new_id;
      plan_revision(s.store, s.revisions, base_id, edited, base_version, new_id, script_id,
                    timestamp);
      nlohmann::json payload{{"base_id", base_id},
                             {"recipe", to_json(edited)},
                             {"script_id", script_id},
                             {"timestamp", timestamp}};
      if (base_version) payload["base_version"] = *base_version;
      return payload;
    });
  }

  // Trains the suggestion model on every stored recipe.
  nlohmann::json train_model() {
    return mutate(EntryKind::kModelTrain, [&](const EngineState& s) {
      std::vector<Recipe> corpus;
      for (const auto& [id, e] : s.store.entries()) corpus.push_back(e.recipe);
      if (corpus.empty()) {
        throw Error(ErrorCode::kEmptyCorpus, "no stored recipes to train on", "corpus");
      }
      return nlohmann::json{{"model", train(corpus, *s.ontology).to_json()}};
    });
  }

  // ---- snapshots -----------------------------------------------------------

  // Canonical JSON of the whole state. Two engines with equal state produce
  // byte-identical dumps.
  nlohmann::json snapshot() const {
    std::shared_lock lock(mu_);
    return snapshot_of(state_);
  }

  void write_snapshot() {
    std::unique_lock lock(mu_);
    write_snapshot_locked();
  }

  static nlohmann::json snapshot_of(const EngineState& s) {
    nlohmann::json j;
    j["format"] = kSnapshotFormat;
    j["seq"] = s.seq;
    j["ontology"] = s.ontology->size() ? s.ontology->to_csv() : "";
    j["nutrition"] = s.nutrients.keys().empty() ? "" : s.nutrients.to_csv();
    j["recipes"] = nlohmann::json::array();
    for (const auto& [id, e] : s.store.entries()) {
      j["recipes"].push_back({{"version", e.version}, {"recipe", to_json(e.recipe)}});
    }
    j["revisions"] = nlohmann::json::array();
    for (const auto& [id, l] : s.revisions.lineages()) {
      j["revisions"].push_back(
          {{"lineage", to_json(l)}, {"script", to_json(s.revisions.script(l.script_id))}});
    }
    j["model"] = s.model.trained() ? s.model.to_json() : nlohmann::json();
    return j;
  }

  static EngineState state_from_snapshot(const nlohmann::json& j) {
    try {
      if (j.value("format", "") != kSnapshotFormat) {
        throw Error(ErrorCode::kLogCorrupt, "unsupported snapshot format", "snapshot");
      }
      EngineState s;
      s.seq = j.at("seq").get<std::uint64_t>();
      const std::string onto = j.at("ontology").get<std::string>();
      if (!onto.empty()) s.ontology = std::make_shared<const Ontology>(Ontology::parse_csv(onto));
      s.store = GraphStore(s.ontology);
      const std::string nut = j.at("nutrition").get<std::string>();
      if (!nut.empty()) s.nutrients = NutrientTable::parse_csv(nut, *s.ontology);
      for (const auto& e : j.at("recipes")) {
        s.store.restore(recipe_from_json(e.at("recipe")), e.at("version").get<std::uint64_t>());
      }
      for (const auto& e : j.at("revisions")) {
        const auto& l = e.at("lineage");
        s.revisions.restore(Lineage{l.at("recipe_id").get<std::string>(),
                                    l.at("parent_id").get<std::string>(),
                                    l.at("script_id").get<std::string>(),
                                    l.at("timestamp").get<std::int64_t>()},
                            script_from_json(e.at("script")));
      }
      if (!j.at("model").is_null()) s.model = SuggestModel::from_json(j.at("model"));
      return s;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kLogCorrupt, std::string("malformed snapshot: ") + e.what(),
                  "snapshot");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kLogCorrupt) throw;
      throw Error(ErrorCode::kLogCorrupt, std::string("invalid snapshot: ") + e.what(),
                  "snapshot");
    }
  }

  // Applies one logged mutation to `s`. Also used for live mutations after the
  // payload has been validated and appended.
  static nlohmann::json apply_entry(EngineState& s, const LogEntry& e) {
    const auto& p = e.payload;
    switch (e.kind) {
      case EntryKind::kOntologyLoad: {
        auto onto = std::make_shared<const Ontology>(Ontology::parse_csv(p.at("csv").get<std::string>()));
        s.nutrients.check_against(*onto);
        s.store.rebind(onto);
        s.ontology = std::move(onto);
        return {{"nodes", s.ontology->size()}};
      }
      case EntryKind::kNutritionLoad: {
        s.nutrients = NutrientTable::parse_csv(p.at("csv").get<std::string>(), *s.ontology);
        return {{"profiles", s.nutrients.size()}};
      }
      case EntryKind::kRecipeUpsert: {
        std::string id = s.store.upsert(recipe_from_json(p.at("recipe")));
        return {{"id", id}, {"version", s.store.version(id)}};
      }
      case EntryKind::kRecipeDelete: {
        s.store.erase(p.at("id").get<std::string>());
        return {{"deleted", p.at("id")}};
      }
      case EntryKind::kRevision: {
        Recipe edited = recipe_from_json(p.at("recipe"));
        std::optional<std::uint64_t> base_version;
        if (p.contains("base_version")) base_version = p.at("base_version").get<std::uint64_t>();
        std::string new_id = edited.id;
        auto result = derive_revision(s.store, s.revisions, p.at("base_id").get<std::string>(),
                                      std::move(edited), base_version, new_id,
                                      p.at("script_id").get<std::string>(),
                                      p.at("timestamp").get<std::int64_t>());
        return {{"id", new_id},
                {"version", s.store.version(new_id)},
                {"lineage", to_json(result.lineage)},
                {"script", to_json(result.script)}};
      }
      case EntryKind::kModelTrain: {
        s.model = SuggestModel::from_json(p.at("model"));
        return {{"recipe_count", s.model.recipe_count}, {"corpus_size", s.model.corpus_size}};
      }
    }
    throw Error(ErrorCode::kLogCorrupt, "unknown entry kind", "kind");
  }

 private:
  // `prepare` validates against the current state (throwing leaves everything
  // untouched) and returns the payload to log and apply.
  template <typename Prepare>
  nlohmann::json mutate(EntryKind kind, Prepare&& prepare) {
    std::unique_lock lock(mu_);
    nlohmann::json payload = prepare(static_cast<const EngineState&>(state_));
    std::uint64_t seq = journal_.append(kind, payload);
    nlohmann::json out = apply_entry(state_, LogEntry{seq, kind, payload});
    state_.seq = seq;
    if (durable() && options_.snapshot_every > 0 &&
        ++since_snapshot_ >= options_.snapshot_every) {
      write_snapshot_locked();
    }
    return out;
  }

  void write_snapshot_locked() {
    if (!durable()) return;
    auto path = data_dir_ / "snapshot.json";
    auto tmp = data_dir_ / "snapshot.json.tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << snapshot_of(state_).dump() << '\n';
      out.flush();
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    since_snapshot_ = 0;
  }

  EngineOptions options_;
  mutable std::shared_mutex mu_;
  EngineState state_;
  Journal journal_;
  std::filesystem::path data_dir_;
  std::uint64_t since_snapshot_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace fkg

#endif  // FKG_ENGINE_HPP_
