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

// Append-only mutation log. One JSON document per line:
//
//   {"checksum":"1a2b3c4d","kind":"recipe_upsert","payload":{...},"seq":7}
//
// The checksum is the CRC-32 of the compact payload text. Sequence numbers
// strictly increase. A final line lacking its newline is a torn write from a
// crash and is discarded on open; any other bad line makes the log corrupt.

#ifndef FKG_JOURNAL_HPP_
#define FKG_JOURNAL_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <unistd.h>
#include <zlib.h>

#include <nlohmann/json.hpp>

#include "fkg/error.hpp"

namespace fkg {

enum class EntryKind {
  kOntologyLoad,
  kNutritionLoad,
  kRecipeUpsert,
  kRecipeDelete,
  kRevision,
  kModelTrain,
};

inline std::string_view to_string(EntryKind k) {
  switch (k) {
    case EntryKind::kOntologyLoad: return "ontology_load";
    case EntryKind::kNutritionLoad: return "nutrition_load";
    case EntryKind::kRecipeUpsert: return "recipe_upsert";
    case EntryKind::kRecipeDelete: return "recipe_delete";
    case EntryKind::kRevision: return "revision";
    case EntryKind::kModelTrain: return "model_train";
  }
  return "unknown";
}

inline std::optional<EntryKind> entry_kind_from_string(std::string_view s) {
  for (auto k : {EntryKind::kOntologyLoad, EntryKind::kNutritionLoad, EntryKind::kRecipeUpsert,
                 EntryKind::kRecipeDelete, EntryKind::kRevision, EntryKind::kModelTrain}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct LogEntry {
  std::uint64_t seq = 0;
  EntryKind kind = EntryKind::kRecipeUpsert;
  nlohmann::json payload;
};

inline std::string payload_checksum(const nlohmann::json& payload) {
  std::string body = payload.dump();
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

inline std::string encode_entry(const LogEntry& e) {
  nlohmann::json line = {{"seq", e.seq},
                         {"kind", to_string(e.kind)},
                         {"payload", e.payload},
                         {"checksum", payload_checksum(e.payload)}};
  return line.dump();
}

class Journal {
 public:
  Journal() = default;
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;
  ~Journal() { close(); }

  // Reads every entry of `path` (missing file = empty log), dropping a torn
  // final line, then opens the file for appending.
  std::vector<LogEntry> open(const std::filesystem::path& path) {
    close();
    path_ = path;
    torn_tail_ = false;
    repaired_tail_ = false;
    std::vector<LogEntry> entries;
    std::string content;
    if (std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(ErrorCode::kIo, "cannot read log " + path.string());
      std::ostringstream buf;
      buf << in.rdbuf();
      content = buf.str();
    }
    std::size_t good_end = 0;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      ++line_no;
      std::size_t nl = content.find('\n', pos);
      bool terminated = nl != std::string::npos;
      std::string_view line(content.data() + pos, (terminated ? nl : content.size()) - pos);
      std::size_t next = terminated ? nl + 1 : content.size();
      if (line.empty()) {
        pos = next;
        good_end = next;
        continue;
      }
      try {
        LogEntry e = decode(line, line_no);
        if (!entries.empty() && e.seq <= entries.back().seq) {
          throw Error(ErrorCode::kLogCorrupt,
                      "log line " + std::to_string(line_no) + ": sequence number " +
                          std::to_string(e.seq) + " does not increase");
        }
        if (!terminated) {
          // Complete JSON but no newline: keep it and terminate the line.
          content.push_back('\n');
          next = content.size();
          repaired_tail_ = true;
        }
        entries.push_back(std::move(e));
      } catch (const Error&) {
        if (terminated) throw;
        torn_tail_ = true;
        break;
      }
      pos = next;
      good_end = next;
    }
    if (torn_tail_ || repaired_tail_) {
      std::filesystem::path tmp = path;
      tmp += ".repair";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(good_end));
        if (!out) throw Error(ErrorCode::kIo, "cannot repair log " + path.string());
      }
      std::filesystem::rename(tmp, path);
    }
    file_ = std::fopen(path.string().c_str(), "ab");
    if (!file_) throw Error(ErrorCode::kIo, "cannot open log " + path.string() + " for append");
    last_seq_ = entries.empty() ? 0 : entries.back().seq;
    return entries;
  }

  bool is_open() const { return file_ != nullptr; }
  std::uint64_t last_seq() const { return last_seq_; }
  bool dropped_torn_tail() const { return torn_tail_; }

  // Appends one entry and flushes it to stable storage; returns its seq.
  std::uint64_t append(EntryKind kind, const nlohmann::json& payload) {
    LogEntry e{last_seq_ + 1, kind, payload};
    if (file_) {
      std::string line = encode_entry(e) + "\n";
      if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
          std::fflush(file_) != 0) {
        throw Error(ErrorCode::kIo, "cannot append to log " + path_.string());
      }
      ::fsync(fileno(file_));
    }
    last_seq_ = e.seq;
    return e.seq;
  }

  // Sequence numbers continue from `seq` (used when no file is attached).
  void set_last_seq(std::uint64_t seq) { last_seq_ = seq; }

  void close() {
    if (file_) std::fclose(file_);
    file_ = nullptr;
  }

  static LogEntry decode(std::string_view line, std::size_t line_no) {
    auto corrupt = [&](const std::string& what) {
      return Error(ErrorCode::kLogCorrupt, "log line " + std::to_string(line_no) + ": " + what);
    };
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw corrupt("not a JSON object");
    if (!j.contains("seq") || !j["seq"].is_number_unsigned() || !j.contains("kind") ||
        !j["kind"].is_string() || !j.contains("payload") || !j.contains("checksum") ||
        !j["checksum"].is_string()) {
      throw corrupt("missing seq, kind, payload or checksum");
    }
    auto kind = entry_kind_from_string(j["kind"].get<std::string>());
    if (!kind) throw corrupt("unknown entry kind");
    if (payload_checksum(j["payload"]) != j["checksum"].get<std::string>()) {
      throw corrupt("checksum mismatch");
    }
    return LogEntry{j["seq"].get<std::uint64_t>(), *kind, j["payload"]};
  }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::uint64_t last_seq_ = 0;
  bool torn_tail_ = false;
  bool repaired_tail_ = false;
};

}  // namespace fkg

#endif  // FKG_JOURNAL_HPP_
