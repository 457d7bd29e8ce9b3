#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lfg/error.hpp"
#include "lfg/factorization.hpp"
#include "lfg/ingest.hpp"

namespace lfg {

struct SelectionConfig {
  double pop_weight = 0.4;
  double relevance_weight = 0.3;
  double specificity_weight = 0.3;
  double candidate_quantile = 0.75;
  int set_size = 25;

  void validate() const {
    if (pop_weight < 0 || relevance_weight < 0 || specificity_weight < 0)
      throw Error("bad_config", "selection weights must be non-negative");
    if (std::abs(pop_weight + relevance_weight + specificity_weight - 1.0) > 1e-9)
      throw Error("bad_config", "selection weights must sum to 1");
    if (!(candidate_quantile > 0.0 && candidate_quantile < 1.0))
      throw Error("bad_config", "candidate_quantile must lie in (0, 1)");
    if (set_size < 1) throw Error("bad_config", "set_size must be >= 1");
  }
};

/// Linear-interpolation quantile (the "type 7" estimator): position q·(n−1)
/// in the sorted values.
template <typename Derived>
double linear_quantile(const Eigen::DenseBase<Derived>& values, double q) {
  const Eigen::Index n = values.size();
  if (n == 0) throw Error("bad_argument", "quantile of an empty set");
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = static_cast<double>(values(i));
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Items whose value in column `f` reaches that column's `q` quantile, in
/// ascending item order. Values equal to the threshold are included.
template <typename Derived>
std::vector<Eigen::Index> candidate_pool(const Eigen::MatrixBase<Derived>& item_factors, Eigen::Index f, double q) {
  if (f < 0 || f >= item_factors.cols())
    throw Error("bad_factor", "factor " + std::to_string(f) + " out of range");
  const auto column = item_factors.col(f);
  const double threshold = linear_quantile(column, q);
  std::vector<Eigen::Index> pool;
  for (Eigen::Index i = 0; i < column.size(); ++i)
    if (static_cast<double>(column(i)) >= threshold) pool.push_back(i);
  return pool;
}

struct ItemComponents {
  Eigen::Index item = 0;
  double pop_norm = 0;
  double rel_norm = 0;
  double spec_norm = 0;
};

namespace detail {

/// Min-max scaling onto [0, 1]; a constant vector maps to all ones.
inline Eigen::ArrayXd min_max(const Eigen::ArrayXd& raw) {
  const double lo = raw.minCoeff();
  const double hi = raw.maxCoeff();
  if (!(hi > lo)) return Eigen::ArrayXd::Ones(raw.size());
  return (raw - lo) / (hi - lo);
}

}  // namespace detail

/// Unnormalized components for each pooled item, in pool order.
struct RawComponents {
  Eigen::ArrayXd popularity;   // ln(1 + rating count)
  Eigen::ArrayXd relevance;    // Q[i,f]
  Eigen::ArrayXd specificity;  // Q[i,f] − mean_{g≠f} |Q[i,g]|
};

template <typename Derived>
RawComponents compute_raw_components(const Eigen::MatrixBase<Derived>& item_factors,
                                     std::span<const std::int64_t> rating_counts, Eigen::Index f,
                                     std::span<const Eigen::Index> pool) {
  const Eigen::Index k = item_factors.cols();
  const auto n = static_cast<Eigen::Index>(pool.size());
  RawComponents raw{Eigen::ArrayXd(n), Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index i = pool[static_cast<std::size_t>(j)];
    const auto row = item_factors.row(i).template cast<double>();
    raw.popularity(j) = std::log1p(static_cast<double>(rating_counts[static_cast<std::size_t>(i)]));
    raw.relevance(j) = row(f);
    const double off = k > 1 ? (row.cwiseAbs().sum() - std::abs(row(f))) / static_cast<double>(k - 1) : 0.0;
    raw.specificity(j) = row(f) - off;
  }
  return raw;
}

/// Raw components min-max normalized over the pool.
template <typename Derived>
std::vector<ItemComponents> compute_components(const Eigen::MatrixBase<Derived>& item_factors,
                                               std::span<const std::int64_t> rating_counts, Eigen::Index f,
                                               std::span<const Eigen::Index> pool) {
  if (pool.empty()) throw Error("bad_argument", "empty candidate pool");
  const RawComponents raw = compute_raw_components(item_factors, rating_counts, f, pool);
  const Eigen::ArrayXd pop = detail::min_max(raw.popularity);
  const Eigen::ArrayXd rel = detail::min_max(raw.relevance);
  const Eigen::ArrayXd spec = detail::min_max(raw.specificity);

  std::vector<ItemComponents> out(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const auto e = static_cast<Eigen::Index>(j);
    out[j] = {pool[j], pop(e), rel(e), spec(e)};
  }
  return out;
}

struct RepresentativeEntry {
  Eigen::Index item = -1;  // internal index, -1 when read back without an id map
  ExternalId item_id = 0;
  double pop_norm = 0;
  double rel_norm = 0;
  double spec_norm = 0;
  double score = 0;

  friend bool operator==(const RepresentativeEntry&, const RepresentativeEntry&) = default;
};

struct FactorRepresentatives {
  Eigen::Index factor = 0;
  double threshold = 0;      // pool cut-off on the raw factor value
  std::size_t pool_size = 0;
  bool short_pool = false;   // fewer candidates than set_size
  std::vector<RepresentativeEntry> entries;  // descending by score
};

struct RepresentativeSet {
  std::vector<FactorRepresentatives> factors;

  Eigen::Index factor_count() const noexcept { return static_cast<Eigen::Index>(factors.size()); }
  bool empty() const noexcept {
    return std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.entries.empty(); });
  }
};

inline double weighted_score(const SelectionConfig& cfg, double pop, double rel, double spec) {
  return cfg.pop_weight * pop + cfg.relevance_weight * rel + cfg.specificity_weight * spec;
}

template <typename Scalar>
RepresentativeSet select_representatives(const BasicFactorModel<Scalar>& m, const RatingDataset& ds,
                                         const SelectionConfig& cfg) {
  cfg.validate();
  if (!(m.items == ds.items)) throw Error("bad_argument", "model and dataset use different item universes");
  if (m.item_count() == 0) throw Error("bad_argument", "model has no items");

  RepresentativeSet out;
  for (Eigen::Index f = 0; f < m.factor_count(); ++f) {
    FactorRepresentatives fr;
    fr.factor = f;
    fr.threshold = linear_quantile(m.item_factors.col(f), cfg.candidate_quantile);
    const std::vector<Eigen::Index> pool = candidate_pool(m.item_factors, f, cfg.candidate_quantile);
    fr.pool_size = pool.size();
    fr.short_pool = pool.size() < static_cast<std::size_t>(cfg.set_size);

    for (const ItemComponents& c : compute_components(m.item_factors, ds.item_rating_counts, f, pool)) {
      fr.entries.push_back({c.item, m.items.external(static_cast<std::int32_t>(c.item)), c.pop_norm, c.rel_norm,
                            c.spec_norm, weighted_score(cfg, c.pop_norm, c.rel_norm, c.spec_norm)});
    }
    std::sort(fr.entries.begin(), fr.entries.end(), [](const auto& a, const auto& b) {
      return a.score != b.score ? a.score > b.score : a.item_id < b.item_id;
    });
    if (fr.entries.size() > static_cast<std::size_t>(cfg.set_size)) fr.entries.resize(static_cast<std::size_t>(cfg.set_size));
    out.factors.push_back(std::move(fr));
  }
  return out;
}

/// Tab-separated export, one line per entry after a '#' header:
///   factor  rank  item_id  score  pop_norm  rel_norm  spec_norm
/// factor is 0-based, rank 1-based; reals are printed with 17 significant digits.
void write_representatives(std::ostream& out, const RepresentativeSet& reps);

/// Inverse of write_representatives. Internal indices are resolved through
/// `items` when given.
RepresentativeSet read_representatives(std::istream& in, const IdMap* items = nullptr);

}  // namespace lfg
