#include "lfg/analysis.hpp"

#include <algorithm>
#include <numeric>

namespace lfg {

namespace {

void grow(AggregateTable& t, int factor_id) {
  if (static_cast<std::size_t>(factor_id) >= t.factors.size()) t.factors.resize(static_cast<std::size_t>(factor_id) + 1);
}

}  // namespace

AggregateTable aggregate(std::span<const Event> log, int factor_count) {
  AggregateTable t;
  t.factors.resize(static_cast<std::size_t>(std::max(factor_count, 0)));
  for (const Event& e : log) {
    if (const auto* g = std::get_if<GuessEvent>(&e)) {
      if (g->factor_id < 0 || g->term.empty()) {
        ++t.corrupt_records;
        continue;
      }
      grow(t, g->factor_id);
      ++t.factors[static_cast<std::size_t>(g->factor_id)].guesses;
      ++t.total_guesses;
      t.players.insert(g->player_id);
    } else if (const auto* m = std::get_if<MatchRecord>(&e)) {
      if (m->factor_id < 0 || m->term.empty()) {
        ++t.corrupt_records;
        continue;
      }
      grow(t, m->factor_id);
      auto& f = t.factors[static_cast<std::size_t>(m->factor_id)];
      ++f.matches;
      ++f.term_matches[m->term];
      ++t.total_matches;
    } else if (const auto* r = std::get_if<RoundStarted>(&e)) {
      if (r->factor_id >= 0) grow(t, r->factor_id);
    } else if (const auto* s = std::get_if<SessionStarted>(&e)) {
      t.players.insert(s->players.begin(), s->players.end());
    }
  }
  return t;
}

std::vector<FactorDescription> filter_good_labels(const AggregateTable& table, int threshold) {
  if (threshold < 1) throw Error("bad_config", "good label threshold must be >= 1");
  std::vector<FactorDescription> out;
  for (std::size_t f = 0; f < table.factors.size(); ++f) {
    FactorDescription d;
    d.factor_id = static_cast<int>(f);
    for (const auto& [term, n] : table.factors[f].term_matches)
      if (n >= threshold) d.term_counts.emplace(term, n);
    out.push_back(std::move(d));
  }
  return out;
}

TermVectorSpace build_vectors(std::span<const FactorDescription> descriptions) {
  TermVectorSpace space;
  std::map<std::string, int> doc_freq;
  for (const auto& d : descriptions) {
    if (d.term_counts.empty()) continue;
    ++space.described_factors;
    for (const auto& [term, n] : d.term_counts) ++doc_freq[term];
  }
  if (space.described_factors == 0) throw Error("no_labels", "no factor has a term above the threshold");

  std::map<std::string, Eigen::Index> column;
  space.idf.resize(static_cast<Eigen::Index>(doc_freq.size()));
  for (const auto& [term, df] : doc_freq) {
    const auto c = static_cast<Eigen::Index>(space.dictionary.size());
    column.emplace(term, c);
    space.dictionary.push_back(term);
    space.idf(c) = std::log(static_cast<double>(space.described_factors) / df);
  }

  int rows = 0;
  for (const auto& d : descriptions) rows = std::max(rows, d.factor_id + 1);
  space.weights = Eigen::MatrixXd::Zero(rows, space.idf.size());
  for (const auto& d : descriptions)
    for (const auto& [term, n] : d.term_counts) {
      const Eigen::Index c = column.at(term);
      space.weights(d.factor_id, c) = n * space.idf(c);
    }
  return space;
}

Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& weights) {
  const Eigen::Index k = weights.rows();
  Eigen::MatrixXd sim = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    sim(a, a) = weights.row(a).norm() > 0.0 ? 1.0 : 0.0;
    for (Eigen::Index b = a + 1; b < k; ++b) sim(a, b) = sim(b, a) = cosine(weights.row(a), weights.row(b));
  }
  return sim;
}

AnalysisReport report(std::span<const Event> log, const AnalysisConfig& cfg) {
  AnalysisReport r;
  r.threshold = cfg.good_label_threshold;
  AggregateTable table = aggregate(log, cfg.factor_count.value_or(0));
  if (cfg.factor_count && static_cast<int>(table.factors.size()) > *cfg.factor_count)
    throw Error("bad_config", "log references factors beyond the configured factor count");
  const auto k = static_cast<Eigen::Index>(table.factors.size());

  r.corrupt_records = table.corrupt_records;
  r.total_guesses = table.total_guesses;
  r.total_matches = table.total_matches;
  r.player_count = table.players.size();
  if (r.player_count > 0) {
    r.expected_contribution_guesses = static_cast<double>(r.total_guesses) / static_cast<double>(r.player_count);
    r.expected_contribution_matches = static_cast<double>(r.total_matches) / static_cast<double>(r.player_count);
  }
  for (std::size_t f = 0; f < table.factors.size(); ++f) {
    const auto& t = table.factors[f];
    FactorStats s{static_cast<int>(f), t.guesses, t.matches, std::nullopt};
    if (t.matches > 0) s.guess_match_ratio = static_cast<double>(t.guesses) / static_cast<double>(t.matches);
    r.factors.push_back(s);
  }

  r.descriptions = filter_good_labels(table, cfg.good_label_threshold);
  std::set<std::string> distinct;
  for (const auto& d : r.descriptions)
    for (const auto& [term, n] : d.term_counts) {
      distinct.insert(term);
      r.surviving_matches += n;
    }
  r.surviving_terms = distinct.size();

  r.similarity = Eigen::MatrixXd::Zero(k, k);
  if (!distinct.empty()) {
    TermVectorSpace space = build_vectors(r.descriptions);
    r.dictionary = space.dictionary;
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(k, space.weights.cols());
    weights.topRows(space.weights.rows()) = space.weights;
    r.similarity = similarity_matrix(weights);
  }

  std::vector<double> pairs;
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a + 1; b < k; ++b) pairs.push_back(r.similarity(a, b));
  if (!pairs.empty()) {
    const double n = static_cast<double>(pairs.size());
    const double mean = std::accumulate(pairs.begin(), pairs.end(), 0.0) / n;
    r.mean_similarity = mean;
    if (pairs.size() > 1) {
      double ss = 0.0;
      for (double p : pairs) ss += (p - mean) * (p - mean);
      r.sd_similarity = std::sqrt(ss / (n - 1.0));
    }
  }
  return r;
}

AnalysisReport report(const LogReadResult& log, const AnalysisConfig& cfg) {
  AnalysisReport r = report(std::span<const Event>(log.events), cfg);
  r.corrupt_records += log.corrupt_records;
  return r;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json terms_json(const FactorDescription& d) {
  std::vector<std::pair<std::string, int>> terms(d.term_counts.begin(), d.term_counts.end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [term, n] : terms) out.push_back({{"term", term}, {"matches", n}});
  return out;
}

}  // namespace

nlohmann::json factor_description_json(const AnalysisReport& r, int factor_id) {
  if (factor_id < 0 || static_cast<std::size_t>(factor_id) >= r.factors.size())
    throw Error("unknown_factor", "no factor " + std::to_string(factor_id));
  const auto& s = r.factors[static_cast<std::size_t>(factor_id)];
  return {{"factor_id", factor_id},
          {"threshold", r.threshold},
          {"guesses", s.guesses},
          {"matches", s.matches},
          {"guess_match_ratio", optional_json(s.guess_match_ratio)},
          {"terms", terms_json(r.descriptions[static_cast<std::size_t>(factor_id)])}};
}

nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json factors = nlohmann::json::array();
  for (std::size_t f = 0; f < r.factors.size(); ++f) factors.push_back(factor_description_json(r, static_cast<int>(f)));
  nlohmann::json sim = nlohmann::json::array();
  for (Eigen::Index a = 0; a < r.similarity.rows(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index b = 0; b < r.similarity.cols(); ++b) row.push_back(r.similarity(a, b));
    sim.push_back(std::move(row));
  }
  return {{"threshold", r.threshold},
          {"factor_count", r.factors.size()},
          {"total_guesses", r.total_guesses},
          {"total_matches", r.total_matches},
          {"player_count", r.player_count},
          {"expected_contribution_guesses", optional_json(r.expected_contribution_guesses)},
          {"expected_contribution_matches", optional_json(r.expected_contribution_matches)},
          {"surviving_terms", r.surviving_terms},
          {"surviving_matches", r.surviving_matches},
          {"dictionary", r.dictionary},
          {"factors", std::move(factors)},
          {"similarity", std::move(sim)},
          {"mean_similarity", optional_json(r.mean_similarity)},
          {"sd_similarity", optional_json(r.sd_similarity)},
          {"corrupt_records", r.corrupt_records}};
}

}  // namespace lfg
