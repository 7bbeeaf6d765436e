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

// Random mutation sequences against a durable engine, with simulated crashes.

#ifndef FKG_TESTS_ENGINE_FUZZ_HPP_
#define FKG_TESTS_ENGINE_FUZZ_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fkg/engine.hpp"
#include "support.hpp"

namespace fkg::testing {

struct FuzzOutcome {
  std::size_t attempted = 0;
  std::size_t accepted = 0;
  std::size_t journal_lines = 0;
  std::size_t crash_checks = 0;
  std::vector<std::string> failures;
};

inline std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

inline std::string reopen_dump(const std::filesystem::path& dir) {
  Engine e;
  e.open(dir);
  return e.snapshot().dump();
}

// Runs `steps` random mutations (accepted or rejected) against an engine in
// a fresh directory. At random points the directory is copied as a crash
// image, sometimes with half of a further entry appended, and reopened; the
// reopened state must dump byte-identically to the live state at that point.
inline FuzzOutcome run_engine_fuzz(std::uint64_t seed, std::size_t steps,
                                   std::size_t crash_points) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  FuzzOutcome out;
  auto dir = temp_dir("fuzz");
  EngineOptions opts;
  static const std::uint64_t kEvery[] = {0, 1, 3, 7};
  opts.snapshot_every = kEvery[pick(4)];
  Engine engine(opts);
  engine.open(dir / "live");

  const std::string onto_csv = read_fixture("ontology.csv");
  const std::string nut_csv = read_fixture("nutrients.csv");
  auto onto = Ontology::parse_csv(onto_csv);
  auto pool = concrete_ids(onto);
  std::vector<std::string> ids;

  auto attempt = [&](auto&& f) {
    ++out.attempted;
    try {
      f();
      ++out.accepted;
    } catch (const Error&) {
    }
  };

  attempt([&] { engine.load_ontology(onto_csv); });
  attempt([&] { engine.load_nutrition(nut_csv); });
  std::set<std::size_t> crash_at;
  while (crash_at.size() < std::min(crash_points, steps)) crash_at.insert(pick(steps));

  for (std::size_t i = 0; i < steps; ++i) {
    switch (pick(10)) {
      case 0:
      case 1:
      case 2: {
        Recipe r = random_recipe(rng, pool, pick(4) ? "f" + std::to_string(pick(40)) : "");
        for (auto& u : r.uses) {
          if (pick(3) == 0) u.grams = -1;  // resolve from quantity and unit
        }
        attempt([&] {
          auto res = engine.upsert_recipe(r);
          ids.push_back(res.at("id").get<std::string>());
        });
        break;
      }
      case 3: {
        Recipe r = random_recipe(rng, pool, "bad");
        r.uses.clear();
        attempt([&] { engine.upsert_recipe(r); });
        break;
      }
      case 4: {
        std::string id = ids.empty() || pick(4) == 0 ? "missing" : ids[pick(ids.size())];
        attempt([&] { engine.delete_recipe(id); });
        break;
      }
      case 5:
      case 6: {
        if (ids.empty()) break;
        std::string base = ids[pick(ids.size())];
        std::optional<Recipe> current;
        std::uint64_t version = 0;
        engine.read([&](const EngineState& s) {
          if (s.store.contains(base)) {
            current = s.store.get(base);
            version = s.store.version(base);
          }
          return 0;
        });
        if (!current) break;
        Recipe edited = mutate_recipe(rng, *current, pool);
        std::optional<std::uint64_t> expect;
        if (pick(2)) expect = pick(5) == 0 ? version + 1 : version;
        attempt([&] {
          auto res = engine.revise(base, edited, expect);
          ids.push_back(res.at("id").get<std::string>());
        });
        break;
      }
      case 7:
        attempt([&] { engine.train_model(); });
        break;
      case 8:
        if (pick(4) == 0) {
          attempt([&] { engine.load_ontology(onto_csv); });
        } else {
          attempt([&] { engine.load_nutrition(pick(3) ? nut_csv : "id,x\nNOPE,1\n"); });
        }
        break;
      default:
        attempt([&] { engine.load_ontology("id,name,parent_id,kind\nA,a,B,abstract\n"); });
        break;
    }

    if (crash_at.count(i)) {
      ++out.crash_checks;
      auto image = dir / ("crash" + std::to_string(i));
      std::filesystem::copy(dir / "live", image);
      if (pick(2)) {
        std::ofstream log(image / "journal.log", std::ios::binary | std::ios::app);
        log << R"({"checksum":"00000000","kind":"recipe_upsert","payload":{"reci)";
      }
      std::string want = engine.snapshot().dump();
      try {
        std::string got = reopen_dump(image);
        if (got != want) out.failures.push_back("crash image after step " + std::to_string(i) + " differs");
      } catch (const std::exception& e) {
        out.failures.push_back("crash image after step " + std::to_string(i) + ": " + e.what());
      }
      std::filesystem::remove_all(image);
    }
  }

  out.journal_lines = count_lines(dir / "live" / "journal.log");
  std::string want = engine.snapshot().dump();
  try {
    if (reopen_dump(dir / "live") != want) out.failures.push_back("final reopen differs");
    // The journal alone, without the snapshot, reaches the same state.
    std::filesystem::remove(dir / "live" / "snapshot.json");
    if (reopen_dump(dir / "live") != want) out.failures.push_back("journal-only replay differs");
  } catch (const std::exception& e) {
    out.failures.push_back(std::string("final reopen: ") + e.what());
  }
  std::filesystem::remove_all(dir);
  return out;
}

}  // namespace fkg::testing

#endif  // FKG_TESTS_ENGINE_FUZZ_HPP_
