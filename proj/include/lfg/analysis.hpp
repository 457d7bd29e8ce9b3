#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "lfg/error.hpp"
#include "lfg/event_log.hpp"
#include "lfg/events.hpp"

namespace lfg {

struct AnalysisConfig {
  int good_label_threshold = 2;
  /// Number of factors to report; derived from the highest factor id in the log when unset.
  std::optional<int> factor_count;
};

struct FactorTally {
  long guesses = 0;
  long matches = 0;
  std::map<std::string, int> term_matches;
};

struct AggregateTable {
  std::vector<FactorTally> factors;  // indexed by factor id
  long total_guesses = 0;
  long total_matches = 0;
  std::set<std::string> players;
  std::size_t corrupt_records = 0;
};

/// Counts guesses per factor and matches per (factor, term).
AggregateTable aggregate(std::span<const Event> log, int factor_count = 0);

struct FactorDescription {
  int factor_id = 0;
  std::map<std::string, int> term_counts;  // only terms with at least `threshold` matches
};

std::vector<FactorDescription> filter_good_labels(const AggregateTable& table, int threshold);

/// TF-IDF content vectors over the dictionary of surviving terms.
/// weight(t, f) = matches(t, f) · ln(D / df(t)), with D the number of factors
/// that have any surviving term and df(t) the number of those containing t.
struct TermVectorSpace {
  std::vector<std::string> dictionary;  // sorted
  Eigen::VectorXd idf;
  Eigen::MatrixXd weights;  // factors × dictionary terms
  int described_factors = 0;
};

/// Throws Error("no_labels") when every description is empty.
TermVectorSpace build_vectors(std::span<const FactorDescription> descriptions);

/// Cosine similarity; 0 when either vector has zero norm.
template <typename A, typename B>
double cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() != b.size()) throw Error("dimension_mismatch", "cosine of vectors with different lengths");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

/// Pairwise cosine over the rows of `weights`.
Eigen::MatrixXd similarity_matrix(const Eigen::MatrixXd& weights);

struct FactorStats {
  int factor_id = 0;
  long guesses = 0;
  long matches = 0;
  std::optional<double> guess_match_ratio;
};

struct AnalysisReport {
  int threshold = 2;
  std::vector<FactorStats> factors;
  std::vector<FactorDescription> descriptions;
  long total_guesses = 0;
  long total_matches = 0;
  std::size_t player_count = 0;
  std::optional<double> expected_contribution_guesses;
  std::optional<double> expected_contribution_matches;
  std::size_t surviving_terms = 0;
  long surviving_matches = 0;
  std::vector<std::string> dictionary;
  Eigen::MatrixXd similarity;  // k × k; zero when nothing survives the threshold
  std::optional<double> mean_similarity;  // over the k(k−1)/2 distinct pairs
  std::optional<double> sd_similarity;    // sample standard deviation over the same pairs
  std::size_t corrupt_records = 0;
};

AnalysisReport report(std::span<const Event> log, const AnalysisConfig& cfg);
AnalysisReport report(const LogReadResult& log, const AnalysisConfig& cfg);

nlohmann::json to_json(const AnalysisReport& r);
/// One factor's entry as served over HTTP.
nlohmann::json factor_description_json(const AnalysisReport& r, int factor_id);

}  // namespace lfg
