#include "lfg/game.hpp"

#include <algorithm>
#include <cctype>

#include "lfg/error.hpp"

namespace lfg {

const char* to_string(RoundOutcome o) noexcept {
  switch (o) {
    case RoundOutcome::open: return "open";
    case RoundOutcome::matched: return "match";
    case RoundOutcome::skipped: return "skipped";
    case RoundOutcome::expired: return "expired";
  }
  return "?";
}

const char* to_string(EndReason r) noexcept {
  switch (r) {
    case EndReason::time: return "time";
    case EndReason::partner_left: return "partner_left";
  }
  return "?";
}

void GameConfig::validate() const {
  if (duration_s <= 0) throw Error("bad_config", "duration_s must be > 0");
  if (items_per_round < 1) throw Error("bad_config", "items_per_round must be >= 1");
  if (match_points < 0) throw Error("bad_config", "match_points must be >= 0");
  if (skip_penalty_points > 0) throw Error("bad_config", "skip_penalty_points must be <= 0");
}

std::string normalize_term(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

GameSession GameSession::create(std::string game_id, std::string player1, std::string player2,
                                const RepresentativeSet& reps, const Catalog& catalog, const GameConfig& cfg,
                                Millis now) {
  cfg.validate();
  if (player1 == player2) throw Error("same_player", "a player cannot be paired with themselves");
  if (reps.empty()) throw Error("no_representatives", "representative set is empty");

  GameSession s;
  s.game_id_ = std::move(game_id);
  s.players_ = {std::move(player1), std::move(player2)};
  s.cfg_ = cfg;
  s.rng_.seed(cfg.seed);
  for (const auto& fr : reps.factors) {
    std::vector<ExternalId> ids;
    for (const auto& e : fr.entries) {
      if (!catalog.contains(e.item_id))
        throw Error("missing_item", "representative item " + std::to_string(e.item_id) + " not in catalog");
      ids.push_back(e.item_id);
    }
    if (ids.size() >= static_cast<std::size_t>(cfg.items_per_round))
      s.eligible_factors_.push_back(static_cast<int>(s.factor_items_.size()));
    s.factor_items_.push_back(std::move(ids));
  }
  if (s.eligible_factors_.empty())
    throw Error("no_representatives", "no factor has " + std::to_string(cfg.items_per_round) + " representatives");

  s.started_at_ = now;
  s.ends_at_ = now + Millis{cfg.duration_s} * 1000;
  std::vector<Event> ignored;
  s.record(ignored, SessionStarted{s.game_id_, s.players_, now, s.ends_at_});
  s.start_round(now);
  return s;
}

const RoundState* GameSession::current_round() const noexcept {
  if (rounds_.empty() || !rounds_.back().open()) return nullptr;
  return &rounds_.back();
}

int GameSession::seat_of(std::string_view player) const noexcept {
  if (player == players_[0]) return 0;
  if (player == players_[1]) return 1;
  return -1;
}

void GameSession::record(std::vector<Event>& out, Event e) {
  log_.push_back(e);
  out.push_back(std::move(e));
}

const RoundState& GameSession::start_round(Millis now) {
  if (status_ != SessionStatus::active) throw Error("session_closed", "session " + game_id_ + " is finished");
  if (current_round()) throw Error("round_open", "a round is already open");

  std::vector<int> choices = eligible_factors_;
  if (!rounds_.empty() && choices.size() > 1)
    std::erase(choices, rounds_.back().factor_id);
  std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
  const int factor = choices[pick(rng_)];

  std::vector<ExternalId> pool = factor_items_[static_cast<std::size_t>(factor)];
  const auto n = static_cast<std::size_t>(cfg_.items_per_round);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> j(i, pool.size() - 1);
    std::swap(pool[i], pool[j(rng_)]);
  }
  pool.resize(n);

  RoundState r;
  r.round_id = static_cast<int>(rounds_.size()) + 1;
  r.factor_id = factor;
  r.item_ids = std::move(pool);
  r.started_at = now;
  rounds_.push_back(r);
  std::vector<Event> ignored;
  record(ignored, RoundStarted{game_id_, r.round_id, r.factor_id, r.item_ids, now});
  return rounds_.back();
}

void GameSession::require_open_round(Millis now) const {
  if (status_ != SessionStatus::active) throw Error("session_closed", "session " + game_id_ + " is finished");
  if (now >= ends_at_) throw Error("session_closed", "game clock has run out");
  if (!current_round()) throw Error("round_closed", "no open round");
}

std::vector<Event> GameSession::close_round(RoundOutcome outcome, std::string term, int points_delta, Millis now) {
  std::vector<Event> out;
  RoundState& r = rounds_.back();
  r.outcome = outcome;
  r.matched_term = term;
  r.ended_at = now;
  r.skip_votes = {false, false};
  points_ += points_delta;
  if (outcome == RoundOutcome::matched) {
    ++match_count_;
    record(out, MatchRecord{game_id_, r.round_id, r.factor_id, term, now});
  } else if (outcome == RoundOutcome::skipped) {
    ++skip_count_;
  }
  record(out, RoundEnded{game_id_, r.round_id, r.factor_id, outcome,
                         outcome == RoundOutcome::matched ? std::optional<std::string>(term) : std::nullopt,
                         points_delta, now});
  return out;
}

GuessResult GameSession::submit_guess(std::string_view player, std::string_view raw, Millis now) {
  const int seat = seat_of(player);
  if (seat < 0) throw Error("not_in_session", std::string(player) + " is not playing in " + game_id_);
  require_open_round(now);

  GuessResult res;
  res.term = normalize_term(raw);
  if (res.term.empty()) {
    res.outcome = GuessOutcome::rejected_empty;
    return res;
  }
  RoundState& r = rounds_.back();
  auto& own = r.guesses[static_cast<std::size_t>(seat)];
  if (std::find(own.begin(), own.end(), res.term) != own.end()) {
    res.outcome = GuessOutcome::rejected_duplicate;
    return res;
  }
  own.push_back(res.term);
  record(res.events, GuessEvent{game_id_, r.round_id, r.factor_id, players_[static_cast<std::size_t>(seat)], res.term, now});

  const auto& partner = r.guesses[static_cast<std::size_t>(1 - seat)];
  if (std::find(partner.begin(), partner.end(), res.term) == partner.end()) {
    res.outcome = GuessOutcome::recorded;
    return res;
  }
  res.outcome = GuessOutcome::matched;
  for (auto& e : close_round(RoundOutcome::matched, res.term, cfg_.match_points, now)) res.events.push_back(std::move(e));
  start_round(now);
  res.events.push_back(log_.back());
  return res;
}

SkipResult GameSession::request_skip(std::string_view player, Millis now) {
  const int seat = seat_of(player);
  if (seat < 0) throw Error("not_in_session", std::string(player) + " is not playing in " + game_id_);
  require_open_round(now);

  SkipResult res;
  RoundState& r = rounds_.back();
  if (!r.skip_votes[static_cast<std::size_t>(seat)]) {
    r.skip_votes[static_cast<std::size_t>(seat)] = true;
    record(res.events, SkipVote{game_id_, r.round_id, r.factor_id, players_[static_cast<std::size_t>(seat)], now});
  }
  if (!(r.skip_votes[0] && r.skip_votes[1])) {
    res.outcome = SkipOutcome::pending;
    return res;
  }
  res.outcome = SkipOutcome::skipped;
  for (auto& e : close_round(RoundOutcome::skipped, {}, cfg_.skip_penalty_points, now)) res.events.push_back(std::move(e));
  start_round(now);
  res.events.push_back(log_.back());
  return res;
}

std::vector<Event> GameSession::finish(EndReason reason, Millis now) {
  std::vector<Event> out;
  if (status_ != SessionStatus::active) return out;
  if (current_round()) out = close_round(RoundOutcome::expired, {}, 0, now);
  status_ = SessionStatus::finished;
  const SessionSummary s = summary();
  record(out, SessionFinished{game_id_, players_, s.points, s.match_count, s.skip_count, s.rounds_played, reason,
                              started_at_, now});
  return out;
}

std::vector<Event> GameSession::tick(Millis now) {
  if (status_ != SessionStatus::active || now < ends_at_) return {};
  return finish(EndReason::time, now);
}

std::vector<Event> GameSession::finish_early(EndReason reason, Millis now) { return finish(reason, now); }

SessionSummary GameSession::summary() const {
  if (status_ == SessionStatus::active) throw Error("session_active", "session " + game_id_ + " is still running");
  return {points_, match_count_, skip_count_, match_count_ + skip_count_};
}

}  // namespace lfg
