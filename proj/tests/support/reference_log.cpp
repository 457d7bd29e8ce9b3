#include "reference_log.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace lfg::testing {

const std::vector<ReferenceColumn>& reference_columns() {
  static const std::vector<ReferenceColumn> columns = {
      {620, 54, {{"comedy", 10}, {"funny", 8}, {"disney", 4}, {"action", 3}, {"love", 3}, {"fight", 2}, {"sex", 2}}},
      {612, 57, {{"action", 13}, {"fight", 4}, {"man", 4}, {"serious", 4}, {"thrilling", 3}, {"comedy", 2}, {"dog", 2},
                 {"drama", 2}, {"thriller", 2}, {"war", 2}}},
      {589, 51, {{"action", 12}, {"war", 5}, {"fight", 4}, {"comedy", 3}, {"drama", 2}}},
      {565, 49, {{"action", 13}, {"comedy", 8}, {"drama", 2}, {"funny", 2}, {"spooky", 2}, {"thriller", 2}}},
      {562, 55, {{"action", 7}, {"comedy", 5}, {"horror", 5}, {"love", 5}, {"spooky", 3}, {"erotic", 2}, {"mystery", 2},
                 {"old", 2}}},
      {580, 65, {{"action", 24}, {"comedy", 3}, {"adventure", 2}, {"alien", 2}, {"fight", 2}, {"love", 2}, {"old", 2},
                 {"weapons", 2}}},
      {423, 42, {{"comedy", 10}, {"sex", 7}, {"action", 2}, {"college", 2}, {"drama", 2}}},
      {438, 50, {{"love", 12}, {"comedy", 5}, {"family", 3}, {"action", 2}, {"america", 2}, {"boring", 2}, {"romance", 2},
                 {"sex", 2}, {"woman", 2}}},
      {754, 66, {{"action", 18}, {"horror", 6}, {"sci-fi", 3}, {"spooky", 3}, {"alien", 2}, {"aliens", 2}, {"batman", 2},
                 {"comedy", 2}, {"future", 2}}},
      {598, 56, {{"love", 11}, {"comedy", 6}, {"family", 4}, {"action", 3}, {"animals", 3}, {"romance", 3},
                 {"romantic", 3}, {"dramatic", 2}}},
  };
  return columns;
}

namespace {

struct PlannedRound {
  int factor;
  std::string term;  // matched term
  int misses;        // guesses that do not match
};

std::string numbered(const char* prefix, int factor, long n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-f%d-%04ld", prefix, factor + 1, n);
  return buf;
}

std::string player_name(long n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "player-%02ld", n + 1);
  return buf;
}

}  // namespace

std::vector<Event> make_reference_log() {
  const auto& cols = reference_columns();
  std::vector<PlannedRound> rounds;
  for (int f = 0; f < static_cast<int>(cols.size()); ++f) {
    const auto& c = cols[static_cast<std::size_t>(f)];
    std::vector<std::string> terms;
    for (const auto& [term, n] : c.terms) terms.insert(terms.end(), static_cast<std::size_t>(n), term);
    for (long n = static_cast<long>(terms.size()); n < c.matches; ++n) terms.push_back(numbered("once", f, n));

    // Every match costs one guess per player; the rest are spread as misses.
    long misses = c.guesses - 2 * c.matches;
    const auto per_round = misses / c.matches;
    long extra = misses % c.matches;
    for (const auto& t : terms) {
      rounds.push_back({f, t, static_cast<int>(per_round + (extra > 0 ? 1 : 0))});
      if (extra > 0) --extra;
    }
  }
  std::mt19937 rng(20180101);
  std::shuffle(rounds.begin(), rounds.end(), rng);

  std::vector<Event> log;
  Millis clock = 1'500'000'000'000;
  long miss_id = 0;
  std::size_t next = 0;
  for (int g = 0; g < kReferenceGames; ++g) {
    const std::string game_id = "fixture-" + std::to_string(g + 1);
    const std::array<std::string, 2> players = {player_name(g % kReferencePlayers),
                                                player_name((g + 1 + g / kReferencePlayers) % kReferencePlayers)};
    const Millis start = clock;
    log.push_back(SessionStarted{game_id, players, start, start + 180'000});
    // Spread the planned rounds as evenly as possible across games.
    const std::size_t until = rounds.size() * static_cast<std::size_t>(g + 1) / kReferenceGames;
    int round_id = 0, matches = 0;
    for (; next < until; ++next) {
      const auto& r = rounds[next];
      ++round_id;
      log.push_back(RoundStarted{game_id, round_id, r.factor, {1, 2, 3}, clock});
      for (int m = 0; m < r.misses; ++m)
        log.push_back(GuessEvent{game_id, round_id, r.factor, players[static_cast<std::size_t>(m % 2)],
                                 numbered("miss", r.factor, miss_id++), clock += 500});
      log.push_back(GuessEvent{game_id, round_id, r.factor, players[0], r.term, clock += 500});
      log.push_back(GuessEvent{game_id, round_id, r.factor, players[1], r.term, clock += 500});
      log.push_back(MatchRecord{game_id, round_id, r.factor, r.term, clock});
      log.push_back(RoundEnded{game_id, round_id, r.factor, RoundOutcome::matched, r.term, 100, clock});
      ++matches;
    }
    clock = start + 180'000;
    log.push_back(SessionFinished{game_id, players, 100 * matches, matches, 0, matches, EndReason::time, start, clock});
    clock += 1000;
  }
  return log;
}

}  // namespace lfg::testing
