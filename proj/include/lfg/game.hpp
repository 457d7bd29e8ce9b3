#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lfg/events.hpp"
#include "lfg/ingest.hpp"
#include "lfg/representatives.hpp"

namespace lfg {

struct GameConfig {
  int duration_s = 180;
  int items_per_round = 3;
  int match_points = 100;
  int skip_penalty_points = -20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Lowercases ASCII letters, trims surrounding whitespace and collapses inner
/// whitespace runs to one space. Nothing else is altered.
std::string normalize_term(std::string_view raw);

struct RoundState {
  int round_id = 0;
  int factor_id = 0;
  std::vector<ExternalId> item_ids;
  std::array<std::vector<std::string>, 2> guesses;
  std::array<bool, 2> skip_votes{};
  RoundOutcome outcome = RoundOutcome::open;
  std::string matched_term;
  Millis started_at = 0;
  Millis ended_at = 0;

  bool open() const noexcept { return outcome == RoundOutcome::open; }
};

enum class SessionStatus { active, finished };
enum class GuessOutcome { recorded, matched, rejected_duplicate, rejected_empty };
enum class SkipOutcome { pending, skipped };

struct GuessResult {
  GuessOutcome outcome = GuessOutcome::recorded;
  std::string term;  // normalized
  std::vector<Event> events;
};

struct SkipResult {
  SkipOutcome outcome = SkipOutcome::pending;
  std::vector<Event> events;
};

struct SessionSummary {
  int points = 0;
  int match_count = 0;
  int skip_count = 0;
  int rounds_played = 0;  // matched + skipped; an expired final round is not counted
};

/// One two-player output-agreement game. Every mutation takes `now` from the
/// caller and returns the events it produced, which are also kept in log().
/// Not thread-safe; callers serialize access per session.
class GameSession {
 public:
  /// Starts the session and its first round. Every representative must be in
  /// the catalog.
  static GameSession create(std::string game_id, std::string player1, std::string player2,
                            const RepresentativeSet& reps, const Catalog& catalog, const GameConfig& cfg, Millis now);

  /// Opens the next round; rounds also start automatically after a match or skip.
  const RoundState& start_round(Millis now);

  /// Throws Error with code session_closed, not_in_session or round_closed.
  GuessResult submit_guess(std::string_view player, std::string_view raw, Millis now);
  SkipResult request_skip(std::string_view player, Millis now);

  /// Finishes the game once `now` reaches ends_at; a no-op afterwards.
  std::vector<Event> tick(Millis now);
  /// Ends the game immediately, e.g. when a player disconnects.
  std::vector<Event> finish_early(EndReason reason, Millis now);

  /// Throws Error("session_active") while the game is running.
  SessionSummary summary() const;

  const std::string& game_id() const noexcept { return game_id_; }
  const std::array<std::string, 2>& players() const noexcept { return players_; }
  Millis started_at() const noexcept { return started_at_; }
  Millis ends_at() const noexcept { return ends_at_; }
  SessionStatus status() const noexcept { return status_; }
  int points() const noexcept { return points_; }
  int match_count() const noexcept { return match_count_; }
  int skip_count() const noexcept { return skip_count_; }
  const std::vector<RoundState>& rounds() const noexcept { return rounds_; }
  const RoundState* current_round() const noexcept;
  const std::vector<Event>& log() const noexcept { return log_; }
  const GameConfig& config() const noexcept { return cfg_; }

  /// 0 or 1, or -1 when `player` is not in this session.
  int seat_of(std::string_view player) const noexcept;

 private:
  GameSession() = default;

  void require_open_round(Millis now) const;
  std::vector<Event> close_round(RoundOutcome outcome, std::string term, int points_delta, Millis now);
  std::vector<Event> finish(EndReason reason, Millis now);
  void record(std::vector<Event>& out, Event e);

  std::string game_id_;
  std::array<std::string, 2> players_;
  GameConfig cfg_;
  std::vector<std::vector<ExternalId>> factor_items_;
  std::vector<int> eligible_factors_;
  std::mt19937_64 rng_;
  Millis started_at_ = 0;
  Millis ends_at_ = 0;
  SessionStatus status_ = SessionStatus::active;
  int points_ = 0;
  int match_count_ = 0;
  int skip_count_ = 0;
  std::vector<RoundState> rounds_;
  std::vector<Event> log_;
};

}  // namespace lfg
