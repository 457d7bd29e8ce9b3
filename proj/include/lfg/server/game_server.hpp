#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfg/event_log.hpp"
#include "lfg/game.hpp"
#include "lfg/ingest.hpp"
#include "lfg/representatives.hpp"

namespace lfg::server {

using ConnectionId = std::uint64_t;

struct Outbound {
  ConnectionId to = 0;
  nlohmann::json message;

  friend bool operator==(const Outbound&, const Outbound&) = default;
};

/// Immutable game content. A running game keeps the snapshot it started with,
/// so installing a new one never affects games in progress.
struct ContentSnapshot {
  RepresentativeSet representatives;
  Catalog catalog;
  std::string version;
};

struct PlayerProfile {
  std::string player_id;
  std::string display_name;
  long total_points = 0;
  int games_played = 0;
  int total_matches = 0;
  Millis first_game_at = 0;

  friend bool operator==(const PlayerProfile&, const PlayerProfile&) = default;
};

/// Folds session summaries into per-player totals. Each player of a session is
/// credited with the session's shared score.
class Leaderboard {
 public:
  void add(const SessionFinished& s);
  void add(std::span<const Event> log);

  /// Descending by total_points; ties go to the earlier first game, then name.
  std::vector<PlayerProfile> top(std::size_t n) const;
  std::size_t size() const noexcept { return players_.size(); }

 private:
  std::map<std::string, PlayerProfile> players_;
};

nlohmann::json to_json(const PlayerProfile& p);

/// Matchmaking, message routing and game supervision for any transport.
///
/// Every entry point takes the current time and returns the messages to
/// deliver, in order. Game events are appended to the EventLog before any
/// message is produced, so an acknowledgement always refers to a durable
/// record. Not thread-safe apart from install_content()/content(); the
/// transport serializes calls.
class GameServer {
 public:
  GameServer(EventLog& log, GameConfig cfg);

  void install_content(std::shared_ptr<const ContentSnapshot> snapshot);
  std::shared_ptr<const ContentSnapshot> content() const;

  std::vector<Outbound> route_message(ConnectionId conn, std::string_view raw, Millis now);
  std::vector<Outbound> handle_disconnect(ConnectionId conn, Millis now);
  /// Finishes every game whose clock has run out.
  std::vector<Outbound> tick(Millis now);

  std::vector<PlayerProfile> leaderboard(std::size_t top_n) const { return leaderboard_.top(top_n); }

  std::size_t queue_size() const noexcept { return queue_.size(); }
  std::size_t active_games() const noexcept { return games_.size(); }
  const EventLog& log() const noexcept { return log_; }
  const GameConfig& config() const noexcept { return cfg_; }

 private:
  struct Game {
    GameSession session;
    std::shared_ptr<const ContentSnapshot> content;
    std::array<ConnectionId, 2> conns;
  };
  struct Connection {
    std::string name;  // empty while in the lobby
    std::optional<std::string> game_id;
    bool queued = false;
  };

  std::vector<Outbound> join_queue(ConnectionId conn, const nlohmann::json& msg, Millis now);
  std::vector<Outbound> guess(ConnectionId conn, const nlohmann::json& msg, Millis now);
  std::vector<Outbound> skip(ConnectionId conn, const nlohmann::json& msg, Millis now);
  std::vector<Outbound> leave(ConnectionId conn, Millis now);

  /// Validates game_id/round_id against the sender's game.
  Game& game_for(ConnectionId conn, const nlohmann::json& msg);
  /// Persists `events`, then turns them into client messages.
  void publish(Game& g, std::span<const Event> events, std::vector<Outbound>& out);
  void end_game(const std::string& game_id);

  EventLog& log_;
  GameConfig cfg_;
  mutable std::mutex content_mutex_;
  std::shared_ptr<const ContentSnapshot> content_;
  std::map<ConnectionId, Connection> conns_;
  std::deque<ConnectionId> queue_;
  std::map<std::string, Game> games_;
  Leaderboard leaderboard_;
  long games_created_ = 0;
};

/// {"type":"error","code":...,"message":...}
nlohmann::json error_message(std::string_view code, std::string_view message);

}  // namespace lfg::server
