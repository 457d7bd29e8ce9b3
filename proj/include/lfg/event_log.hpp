#pragma once

#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfg/events.hpp"

namespace lfg {

// One JSON object per line. Every record has "type", "game_id" and "ts"
// (milliseconds since the epoch). Types and their extra fields:
//
//   session_start  players[2], ends_at
//   round_start    round_id, factor_id, item_ids[]
//   guess          round_id, factor_id, player_id, term
//   skip_vote      round_id, factor_id, player_id
//   match          round_id, factor_id, term
//   round_end      round_id, factor_id, outcome ("match"|"skipped"|"expired"), term|null, points_delta
//   session_end    players[2], points, match_count, skip_count, rounds_played,
//                  reason ("time"|"partner_left"), started_at

nlohmann::json to_json(const Event& e);
/// Throws Error("bad_record") when the object does not match the schema above.
Event event_from_json(const nlohmann::json& j);

std::string to_log_line(const Event& e);

struct LogReadResult {
  std::vector<Event> events;
  std::size_t corrupt_records = 0;
};

/// Parses log text; unparseable or schema-invalid lines are counted and skipped.
LogReadResult parse_event_log(std::string_view text);
LogReadResult read_event_log(const std::filesystem::path& path);

void write_event_log(const std::filesystem::path& path, std::span<const Event> events);

/// Append-only event store. With a path, every append is written and flushed
/// to disk (fsync) before returning; the in-memory copy serves replay and
/// analysis. Without a path the log is memory-only.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::filesystem::path path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const Event& e);
  void append(std::span<const Event> events);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t corrupt_records_on_open() const noexcept { return corrupt_on_open_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::vector<Event> events_;
  std::size_t corrupt_on_open_ = 0;
};

}  // namespace lfg
