#include "lfg/server/game_server.hpp"

#include <algorithm>

#include "lfg/error.hpp"

namespace lfg::server {

using nlohmann::json;

json error_message(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

void Leaderboard::add(const SessionFinished& s) {
  for (const auto& name : s.players) {
    auto [it, fresh] = players_.try_emplace(name);
    PlayerProfile& p = it->second;
    if (fresh) {
      p.player_id = p.display_name = name;
      p.first_game_at = s.started_at;
    }
    p.first_game_at = std::min(p.first_game_at, s.started_at);
    p.total_points += s.points;
    p.total_matches += s.match_count;
    ++p.games_played;
  }
}

void Leaderboard::add(std::span<const Event> log) {
  for (const auto& e : log)
    if (const auto* s = std::get_if<SessionFinished>(&e)) add(*s);
}

std::vector<PlayerProfile> Leaderboard::top(std::size_t n) const {
  std::vector<PlayerProfile> all;
  for (const auto& [name, p] : players_) all.push_back(p);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.total_points != b.total_points) return a.total_points > b.total_points;
    if (a.first_game_at != b.first_game_at) return a.first_game_at < b.first_game_at;
    return a.player_id < b.player_id;
  });
  if (all.size() > n) all.resize(n);
  return all;
}

json to_json(const PlayerProfile& p) {
  return {{"player_id", p.player_id},       {"display_name", p.display_name}, {"total_points", p.total_points},
          {"games_played", p.games_played}, {"total_matches", p.total_matches}};
}

GameServer::GameServer(EventLog& log, GameConfig cfg) : log_(log), cfg_(cfg) {
  cfg_.validate();
  leaderboard_.add(log_.events());
  games_created_ = std::count_if(log_.events().begin(), log_.events().end(),
                                 [](const Event& e) { return std::holds_alternative<SessionStarted>(e); });
}

void GameServer::install_content(std::shared_ptr<const ContentSnapshot> snapshot) {
  std::lock_guard lock(content_mutex_);
  content_ = std::move(snapshot);
}

std::shared_ptr<const ContentSnapshot> GameServer::content() const {
  std::lock_guard lock(content_mutex_);
  return content_;
}

namespace {

const std::string& required_string(const json& msg, const char* field) {
  const auto it = msg.find(field);
  if (it == msg.end() || !it->is_string()) throw Error("bad_schema", std::string("field '") + field + "' must be a string");
  return it->get_ref<const std::string&>();
}

}  // namespace

std::vector<Outbound> GameServer::route_message(ConnectionId conn, std::string_view raw, Millis now) {
  conns_.try_emplace(conn);
  try {
    const json msg = json::parse(raw, nullptr, false);
    if (!msg.is_object()) throw Error("bad_schema", "message must be a JSON object");
    const std::string& type = required_string(msg, "type");
    if (type == "join_queue") return join_queue(conn, msg, now);
    if (type == "guess") return guess(conn, msg, now);
    if (type == "skip") return skip(conn, msg, now);
    if (type == "leave") return leave(conn, now);
    throw Error("bad_schema", "unknown message type '" + type + "'");
  } catch (const Error& e) {
    return {{conn, error_message(e.code(), e.what())}};
  }
}

std::vector<Outbound> GameServer::join_queue(ConnectionId conn, const json& msg, Millis now) {
  const std::string name = required_string(msg, "name");
  if (normalize_term(name).empty()) throw Error("bad_schema", "name must not be blank");
  Connection& self = conns_[conn];
  if (self.queued) throw Error("already_queued", "already waiting for a partner");
  if (self.game_id) throw Error("in_game", "already playing");
  for (const auto& [id, c] : conns_)
    if (id != conn && c.name == name) throw Error("name_taken", "name '" + name + "' is in use");

  if (queue_.empty()) {
    self.name = name;
    self.queued = true;
    queue_.push_back(conn);
    return {{conn, {{"type", "queued"}}}};
  }

  auto content = this->content();
  if (!content) throw Error("unavailable", "no game content is loaded yet");

  const ConnectionId partner = queue_.front();
  Connection& other = conns_.at(partner);
  const long number = games_created_ + 1;
  GameConfig cfg = cfg_;
  cfg.seed = cfg_.seed + static_cast<std::uint64_t>(number);
  const std::string game_id = "game-" + std::to_string(number);
  GameSession session = GameSession::create(game_id, other.name, name, content->representatives, content->catalog, cfg, now);

  ++games_created_;
  queue_.pop_front();
  other.queued = false;
  other.game_id = game_id;
  self.name = name;
  self.game_id = game_id;
  auto [it, inserted] = games_.emplace(game_id, Game{std::move(session), std::move(content), {partner, conn}});
  std::vector<Outbound> out;
  publish(it->second, it->second.session.log(), out);
  return out;
}

GameServer::Game& GameServer::game_for(ConnectionId conn, const json& msg) {
  const std::string& game_id = required_string(msg, "game_id");
  const std::string& round_id = required_string(msg, "round_id");
  const Connection& c = conns_.at(conn);
  if (!c.game_id || *c.game_id != game_id) throw Error("unknown_game", "no game '" + game_id + "' for this player");
  Game& g = games_.at(game_id);
  const RoundState* r = g.session.current_round();
  if (!r || std::to_string(r->round_id) != round_id)
    throw Error("unknown_round", "round '" + round_id + "' is not open");
  return g;
}

std::vector<Outbound> GameServer::guess(ConnectionId conn, const json& msg, Millis now) {
  const std::string& term = required_string(msg, "term");
  Game& g = game_for(conn, msg);
  GuessResult r = g.session.submit_guess(conns_.at(conn).name, term, now);
  if (r.outcome == GuessOutcome::rejected_empty) throw Error("empty_term", "guess is empty after normalization");
  if (r.outcome == GuessOutcome::rejected_duplicate) throw Error("duplicate_guess", "term '" + r.term + "' already guessed this round");
  std::vector<Outbound> out;
  publish(g, r.events, out);
  return out;
}

std::vector<Outbound> GameServer::skip(ConnectionId conn, const json& msg, Millis now) {
  Game& g = game_for(conn, msg);
  SkipResult r = g.session.request_skip(conns_.at(conn).name, now);
  std::vector<Outbound> out;
  publish(g, r.events, out);
  if (r.outcome == SkipOutcome::pending) out.push_back({conn, {{"type", "skip_pending"}}});
  return out;
}

std::vector<Outbound> GameServer::leave(ConnectionId conn, Millis now) {
  Connection& c = conns_.at(conn);
  std::vector<Outbound> out;
  if (c.queued) {
    std::erase(queue_, conn);
    c = Connection{};
  } else if (c.game_id) {
    const std::string game_id = *c.game_id;
    Game& g = games_.at(game_id);
    publish(g, g.session.finish_early(EndReason::partner_left, now), out);
    end_game(game_id);
  }
  return out;
}

std::vector<Outbound> GameServer::handle_disconnect(ConnectionId conn, Millis now) {
  std::vector<Outbound> out;
  const auto it = conns_.find(conn);
  if (it == conns_.end()) return out;
  if (it->second.game_id) {
    Game& g = games_.at(*it->second.game_id);
    for (auto& c : g.conns)
      if (c == conn) c = 0;  // nothing more is delivered to a closed connection
  }
  out = leave(conn, now);
  conns_.erase(conn);
  return out;
}

std::vector<Outbound> GameServer::tick(Millis now) {
  std::vector<Outbound> out;
  std::vector<std::string> finished;
  for (auto& [id, g] : games_) {
    publish(g, g.session.tick(now), out);
    if (g.session.status() == SessionStatus::finished) finished.push_back(id);
  }
  for (const auto& id : finished) end_game(id);
  return out;
}

void GameServer::end_game(const std::string& game_id) {
  const auto it = games_.find(game_id);
  if (it == games_.end()) return;
  for (ConnectionId c : it->second.conns)
    if (auto ci = conns_.find(c); c != 0 && ci != conns_.end()) ci->second = Connection{};
  games_.erase(it);
}

void GameServer::publish(Game& g, std::span<const Event> events, std::vector<Outbound>& out) {
  log_.append(events);

  const auto& players = g.session.players();
  auto to_both = [&](const json& m) {
    for (ConnectionId c : g.conns)
      if (c != 0) out.push_back({c, m});
  };
  auto to_seat = [&](int seat, json m) {
    if (seat >= 0 && g.conns[static_cast<std::size_t>(seat)] != 0)
      out.push_back({g.conns[static_cast<std::size_t>(seat)], std::move(m)});
  };

  for (const Event& e : events) {
    if (const auto* s = std::get_if<SessionStarted>(&e)) {
      for (int seat = 0; seat < 2; ++seat)
        to_seat(seat, {{"type", "game_start"},
                       {"game_id", s->game_id},
                       {"ends_at", s->ends_at},
                       {"partner_name", players[static_cast<std::size_t>(1 - seat)]}});
    } else if (const auto* r = std::get_if<RoundStarted>(&e)) {
      json items = json::array();
      for (ExternalId id : r->item_ids) {
        const ItemMeta* m = g.content->catalog.find(id);
        items.push_back({{"title", m ? m->title : ""},
                         {"poster_url", m ? m->poster_url : ""},
                         {"plot", m ? m->plot : ""},
                         {"cast", m ? m->cast : std::vector<std::string>{}},
                         {"director", m ? m->director : ""}});
      }
      to_both({{"type", "round_start"}, {"round_id", std::to_string(r->round_id)}, {"items", items}});
    } else if (const auto* gu = std::get_if<GuessEvent>(&e)) {
      const int seat = g.session.seat_of(gu->player_id);
      const auto& round = g.session.rounds().at(static_cast<std::size_t>(gu->round_id - 1));
      to_seat(seat, {{"type", "guess_ack"}, {"term", gu->term}});
      to_seat(1 - seat, {{"type", "partner_activity"},
                         {"guess_count", round.guesses[static_cast<std::size_t>(seat)].size()}});
    } else if (const auto* end = std::get_if<RoundEnded>(&e)) {
      to_both({{"type", "round_end"},
               {"outcome", to_string(end->outcome)},
               {"term", end->term ? json(*end->term) : json(nullptr)},
               {"points_delta", end->points_delta}});
    } else if (const auto* fin = std::get_if<SessionFinished>(&e)) {
      leaderboard_.add(*fin);
      to_both({{"type", "game_end"},
               {"total_points", fin->points},
               {"match_count", fin->match_count},
               {"reason", to_string(fin->reason)}});
    }
  }
}

}  // namespace lfg::server
