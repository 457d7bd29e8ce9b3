#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lfg/ingest.hpp"

namespace lfg {

/// Milliseconds since the Unix epoch. Game logic never reads a clock itself.
using Millis = std::int64_t;

enum class RoundOutcome { open, matched, skipped, expired };
enum class EndReason { time, partner_left };

struct SessionStarted {
  std::string game_id;
  std::array<std::string, 2> players;
  Millis at = 0;
  Millis ends_at = 0;
  friend bool operator==(const SessionStarted&, const SessionStarted&) = default;
};

struct RoundStarted {
  std::string game_id;
  int round_id = 0;
  int factor_id = 0;
  std::vector<ExternalId> item_ids;
  Millis at = 0;
  friend bool operator==(const RoundStarted&, const RoundStarted&) = default;
};

struct GuessEvent {
  std::string game_id;
  int round_id = 0;
  int factor_id = 0;
  std::string player_id;
  std::string term;
  Millis at = 0;
  friend bool operator==(const GuessEvent&, const GuessEvent&) = default;
};

struct SkipVote {
  std::string game_id;
  int round_id = 0;
  int factor_id = 0;
  std::string player_id;
  Millis at = 0;
  friend bool operator==(const SkipVote&, const SkipVote&) = default;
};

struct MatchRecord {
  std::string game_id;
  int round_id = 0;
  int factor_id = 0;
  std::string term;
  Millis at = 0;
  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

struct RoundEnded {
  std::string game_id;
  int round_id = 0;
  int factor_id = 0;
  RoundOutcome outcome = RoundOutcome::expired;
  std::optional<std::string> term;
  int points_delta = 0;
  Millis at = 0;
  friend bool operator==(const RoundEnded&, const RoundEnded&) = default;
};

struct SessionFinished {
  std::string game_id;
  std::array<std::string, 2> players;
  int points = 0;
  int match_count = 0;
  int skip_count = 0;
  int rounds_played = 0;
  EndReason reason = EndReason::time;
  Millis started_at = 0;
  Millis at = 0;
  friend bool operator==(const SessionFinished&, const SessionFinished&) = default;
};

using Event = std::variant<SessionStarted, RoundStarted, GuessEvent, SkipVote, MatchRecord, RoundEnded, SessionFinished>;

const char* to_string(RoundOutcome o) noexcept;
const char* to_string(EndReason r) noexcept;

}  // namespace lfg
