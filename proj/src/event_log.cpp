#include "lfg/event_log.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

#include "lfg/error.hpp"

namespace lfg {

using nlohmann::json;

namespace {

RoundOutcome outcome_from(const std::string& s) {
  if (s == "match") return RoundOutcome::matched;
  if (s == "skipped") return RoundOutcome::skipped;
  if (s == "expired") return RoundOutcome::expired;
  throw Error("bad_record", "unknown round outcome '" + s + "'");
}

EndReason reason_from(const std::string& s) {
  if (s == "time") return EndReason::time;
  if (s == "partner_left") return EndReason::partner_left;
  throw Error("bad_record", "unknown end reason '" + s + "'");
}

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error("bad_record", std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error("bad_record", std::string("wrong type for field '") + key + "'");
  }
}

struct ToJson {
  json operator()(const SessionStarted& e) const {
    return {{"type", "session_start"}, {"game_id", e.game_id}, {"players", e.players}, {"ts", e.at},
            {"ends_at", e.ends_at}};
  }
  json operator()(const RoundStarted& e) const {
    return {{"type", "round_start"}, {"game_id", e.game_id}, {"round_id", e.round_id}, {"factor_id", e.factor_id},
            {"item_ids", e.item_ids}, {"ts", e.at}};
  }
  json operator()(const GuessEvent& e) const {
    return {{"type", "guess"},          {"game_id", e.game_id},     {"round_id", e.round_id},
            {"factor_id", e.factor_id}, {"player_id", e.player_id}, {"term", e.term},
            {"ts", e.at}};
  }
  json operator()(const SkipVote& e) const {
    return {{"type", "skip_vote"},      {"game_id", e.game_id},     {"round_id", e.round_id},
            {"factor_id", e.factor_id}, {"player_id", e.player_id}, {"ts", e.at}};
  }
  json operator()(const MatchRecord& e) const {
    return {{"type", "match"},          {"game_id", e.game_id}, {"round_id", e.round_id},
            {"factor_id", e.factor_id}, {"term", e.term},       {"ts", e.at}};
  }
  json operator()(const RoundEnded& e) const {
    return {{"type", "round_end"},
            {"game_id", e.game_id},
            {"round_id", e.round_id},
            {"factor_id", e.factor_id},
            {"outcome", to_string(e.outcome)},
            {"term", e.term ? json(*e.term) : json(nullptr)},
            {"points_delta", e.points_delta},
            {"ts", e.at}};
  }
  json operator()(const SessionFinished& e) const {
    return {{"type", "session_end"},
            {"game_id", e.game_id},
            {"players", e.players},
            {"points", e.points},
            {"match_count", e.match_count},
            {"skip_count", e.skip_count},
            {"rounds_played", e.rounds_played},
            {"reason", to_string(e.reason)},
            {"started_at", e.started_at},
            {"ts", e.at}};
  }
};

}  // namespace

json to_json(const Event& e) { return std::visit(ToJson{}, e); }

Event event_from_json(const json& j) {
  if (!j.is_object()) throw Error("bad_record", "record is not an object");
  const auto type = field<std::string>(j, "type");
  const auto game_id = field<std::string>(j, "game_id");
  const auto at = field<Millis>(j, "ts");
  if (type == "session_start")
    return SessionStarted{game_id, field<std::array<std::string, 2>>(j, "players"), at, field<Millis>(j, "ends_at")};
  if (type == "round_start")
    return RoundStarted{game_id, field<int>(j, "round_id"), field<int>(j, "factor_id"),
                        field<std::vector<ExternalId>>(j, "item_ids"), at};
  if (type == "guess") {
    GuessEvent g{game_id, field<int>(j, "round_id"), field<int>(j, "factor_id"), field<std::string>(j, "player_id"),
                 field<std::string>(j, "term"), at};
    if (g.term.empty()) throw Error("bad_record", "empty guess term");
    return g;
  }
  if (type == "skip_vote")
    return SkipVote{game_id, field<int>(j, "round_id"), field<int>(j, "factor_id"), field<std::string>(j, "player_id"),
                    at};
  if (type == "match") {
    MatchRecord m{game_id, field<int>(j, "round_id"), field<int>(j, "factor_id"), field<std::string>(j, "term"), at};
    if (m.term.empty()) throw Error("bad_record", "empty match term");
    return m;
  }
  if (type == "round_end") {
    RoundEnded r{game_id, field<int>(j, "round_id"), field<int>(j, "factor_id"),
                 outcome_from(field<std::string>(j, "outcome")), std::nullopt, field<int>(j, "points_delta"), at};
    if (auto it = j.find("term"); it != j.end() && !it->is_null()) r.term = field<std::string>(j, "term");
    return r;
  }
  if (type == "session_end")
    return SessionFinished{game_id,
                           field<std::array<std::string, 2>>(j, "players"),
                           field<int>(j, "points"),
                           field<int>(j, "match_count"),
                           field<int>(j, "skip_count"),
                           field<int>(j, "rounds_played"),
                           reason_from(field<std::string>(j, "reason")),
                           field<Millis>(j, "started_at"),
                           at};
  throw Error("bad_record", "unknown record type '" + type + "'");
}

std::string to_log_line(const Event& e) { return to_json(e).dump() + "\n"; }

LogReadResult parse_event_log(std::string_view text) {
  LogReadResult out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.events.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception&) {
      ++out.corrupt_records;
    } catch (const Error&) {
      ++out.corrupt_records;
    }
  }
  return out;
}

LogReadResult read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open event log " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_event_log(buf.str());
}

void write_event_log(const std::filesystem::path& path, std::span<const Event> events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& e : events) out << to_log_line(e);
  if (!out) throw Error("io", "cannot write event log " + path.string());
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    auto existing = read_event_log(path_);
    events_ = std::move(existing.events);
    corrupt_on_open_ = existing.corrupt_records;
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw Error("io", "cannot open event log " + path_.string() + " for appending");
}

EventLog::~EventLog() {
  if (file_) std::fclose(file_);
}

void EventLog::append(const Event& e) { append(std::span<const Event>(&e, 1)); }

void EventLog::append(std::span<const Event> events) {
  if (events.empty()) return;
  if (file_) {
    std::string chunk;
    for (const auto& e : events) chunk += to_log_line(e);
    if (std::fwrite(chunk.data(), 1, chunk.size(), file_) != chunk.size() || std::fflush(file_) != 0 ||
        ::fsync(::fileno(file_)) != 0)
      throw Error("io", "failed to persist events to " + path_.string());
  }
  events_.insert(events_.end(), events.begin(), events.end());
}

}  // namespace lfg
