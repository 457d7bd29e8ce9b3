#pragma once

// Biased latent factor model trained by stochastic gradient descent.
//
// Prediction:  r̂(u,i) = μ + b_u + b_i + p_u·q_i
// Per-rating loss minimized by each step:
//   ½ e² + ½ λ (‖p_u‖² + ‖q_i‖² + b_u² + b_i²),   e = r − r̂(u,i)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lfg/error.hpp"
#include "lfg/ingest.hpp"

namespace lfg {

struct TrainingConfig {
  int factor_count = 10;
  double reg_lambda = 0.001;
  int iterations = 16;
  double learning_rate = 0.01;
  double lr_decay = 0.9;
  double init_scale = 0.1;
  std::uint64_t seed = 42;

  void validate() const {
    if (factor_count < 1) throw Error("bad_config", "factor_count must be >= 1");
    if (!(reg_lambda >= 0.0)) throw Error("bad_config", "reg_lambda must be >= 0");
    if (iterations < 1) throw Error("bad_config", "iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw Error("bad_config", "learning_rate must be > 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw Error("bad_config", "lr_decay must lie in (0, 1]");
    if (!(init_scale > 0.0)) throw Error("bad_config", "init_scale must be > 0");
  }
};

template <typename Scalar>
struct BasicFactorModel {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix user_factors;  // users × k
  Matrix item_factors;  // items × k
  Vector user_bias;
  Vector item_bias;
  Scalar global_mean{0};
  IdMap users;
  IdMap items;

  BasicFactorModel() = default;
  BasicFactorModel(Eigen::Index user_count, Eigen::Index item_count, Eigen::Index k)
      : user_factors(Matrix::Zero(user_count, k)),
        item_factors(Matrix::Zero(item_count, k)),
        user_bias(Vector::Zero(user_count)),
        item_bias(Vector::Zero(item_count)) {}

  Eigen::Index factor_count() const noexcept { return item_factors.cols(); }
  Eigen::Index user_count() const noexcept { return user_factors.rows(); }
  Eigen::Index item_count() const noexcept { return item_factors.rows(); }

  bool all_finite() const {
    return user_factors.allFinite() && item_factors.allFinite() && user_bias.allFinite() &&
           item_bias.allFinite() && std::isfinite(global_mean);
  }

  friend bool operator==(const BasicFactorModel& a, const BasicFactorModel& b) {
    return a.user_factors.rows() == b.user_factors.rows() && a.user_factors.cols() == b.user_factors.cols() &&
           a.item_factors.rows() == b.item_factors.rows() && a.item_factors.cols() == b.item_factors.cols() &&
           a.user_factors == b.user_factors && a.item_factors == b.item_factors && a.user_bias == b.user_bias &&
           a.item_bias == b.item_bias && a.global_mean == b.global_mean && a.users == b.users &&
           a.items == b.items;
  }
};

using FactorModel = BasicFactorModel<double>;

/// Unknown users or items (nullopt or out of range) drop their bias and factor terms.
template <typename Scalar>
Scalar predict(const BasicFactorModel<Scalar>& m, std::optional<Eigen::Index> user,
               std::optional<Eigen::Index> item) {
  const bool has_user = user && *user >= 0 && *user < m.user_count();
  const bool has_item = item && *item >= 0 && *item < m.item_count();
  Scalar r = m.global_mean;
  if (has_user) r += m.user_bias(*user);
  if (has_item) r += m.item_bias(*item);
  if (has_user && has_item) r += m.user_factors.row(*user).dot(m.item_factors.row(*item));
  return r;
}

/// Prediction by ids as they appear in the ratings file.
template <typename Scalar>
Scalar predict_external(const BasicFactorModel<Scalar>& m, ExternalId user, ExternalId item) {
  auto u = m.users.find(user);
  auto i = m.items.find(item);
  return predict(m, u ? std::optional<Eigen::Index>(*u) : std::nullopt,
                 i ? std::optional<Eigen::Index>(*i) : std::nullopt);
}

/// Descent direction (negative gradient of the per-rating loss) for one observation.
template <typename Scalar>
struct SgdDirection {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> user_factor;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> item_factor;
  Scalar user_bias;
  Scalar item_bias;
  Scalar error;
};

template <typename Scalar>
SgdDirection<Scalar> sgd_direction(const BasicFactorModel<Scalar>& m, Eigen::Index u, Eigen::Index i, Scalar rating,
                                   Scalar lambda) {
  const auto p = m.user_factors.row(u).transpose();
  const auto q = m.item_factors.row(i).transpose();
  const Scalar e = rating - (m.global_mean + m.user_bias(u) + m.item_bias(i) + p.dot(q));
  return {e * q - lambda * p, e * p - lambda * q, e - lambda * m.user_bias(u), e - lambda * m.item_bias(i), e};
}

template <typename Scalar>
void apply_sgd_step(BasicFactorModel<Scalar>& m, Eigen::Index u, Eigen::Index i, Scalar rating, Scalar lambda,
                    Scalar step) {
  // Both factor updates use the pre-step values of p_u and q_i.
  const SgdDirection<Scalar> d = sgd_direction(m, u, i, rating, lambda);
  m.user_factors.row(u) += step * d.user_factor.transpose();
  m.item_factors.row(i) += step * d.item_factor.transpose();
  m.user_bias(u) += step * d.user_bias;
  m.item_bias(i) += step * d.item_bias;
}

/// Sum over `ds` of the per-rating regularized loss.
template <typename Scalar>
double training_objective(const BasicFactorModel<Scalar>& m, const RatingDataset& ds, double lambda) {
  double total = 0.0;
  for (const auto& t : ds.triples) {
    const auto p = m.user_factors.row(t.user);
    const auto q = m.item_factors.row(t.item);
    const double e = t.rating - static_cast<double>(predict<Scalar>(m, t.user, t.item));
    const double reg = static_cast<double>(p.squaredNorm() + q.squaredNorm() + m.user_bias(t.user) * m.user_bias(t.user) +
                                           m.item_bias(t.item) * m.item_bias(t.item));
    total += 0.5 * e * e + 0.5 * lambda * reg;
  }
  return total;
}

/// Called after every epoch with the 1-based epoch number and the model.
template <typename Scalar>
using EpochObserver = std::function<void(int epoch, const BasicFactorModel<Scalar>&)>;

template <typename Scalar = double>
BasicFactorModel<Scalar> train(const RatingDataset& ds, const TrainingConfig& cfg,
                               const EpochObserver<Scalar>& observer = {}) {
  cfg.validate();
  if (ds.empty()) throw Error("empty_dataset", "cannot train on an empty dataset");

  const Eigen::Index k = cfg.factor_count;
  BasicFactorModel<Scalar> m(static_cast<Eigen::Index>(ds.user_count()), static_cast<Eigen::Index>(ds.item_count()),
                             k);
  m.users = ds.users;
  m.items = ds.items;

  double sum = 0.0;
  for (const auto& t : ds.triples) sum += t.rating;
  m.global_mean = static_cast<Scalar>(sum / static_cast<double>(ds.triples.size()));

  std::mt19937_64 rng(cfg.seed);
  const double bound = cfg.init_scale / std::sqrt(static_cast<double>(k));
  std::uniform_real_distribution<double> init(-bound, bound);
  for (Eigen::Index r = 0; r < m.user_factors.rows(); ++r)
    for (Eigen::Index c = 0; c < k; ++c) m.user_factors(r, c) = static_cast<Scalar>(init(rng));
  for (Eigen::Index r = 0; r < m.item_factors.rows(); ++r)
    for (Eigen::Index c = 0; c < k; ++c) m.item_factors(r, c) = static_cast<Scalar>(init(rng));

  std::vector<std::size_t> order(ds.triples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto lambda = static_cast<Scalar>(cfg.reg_lambda);
  double step = cfg.learning_rate;

  for (int epoch = 1; epoch <= cfg.iterations; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const RatingTriple& t = ds.triples[idx];
      apply_sgd_step<Scalar>(m, t.user, t.item, static_cast<Scalar>(t.rating), lambda, static_cast<Scalar>(step));
    }
    if (!m.all_finite())
      throw Error("training_diverged", "non-finite parameters after epoch " + std::to_string(epoch) +
                                           "; try a smaller learning_rate (currently " +
                                           std::to_string(cfg.learning_rate) + ")");
    if (observer) observer(epoch, m);
    step *= cfg.lr_decay;
  }
  return m;
}

struct EvalMetrics {
  double rmse = 0.0;
  std::optional<double> ndcg_at_10;
};

/// NDCG@cutoff for one user's held-out items with linear gain and log2(rank+1)
/// discount. Items are ranked by `predicted` descending; ties keep input order.
inline double ndcg_at(std::span<const double> actual, std::span<const double> predicted, std::size_t cutoff) {
  std::vector<std::size_t> by_pred(actual.size());
  std::iota(by_pred.begin(), by_pred.end(), std::size_t{0});
  std::stable_sort(by_pred.begin(), by_pred.end(),
                   [&](std::size_t a, std::size_t b) { return predicted[a] > predicted[b]; });
  std::vector<double> ideal(actual.begin(), actual.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  double dcg = 0.0, idcg = 0.0;
  const std::size_t n = std::min(cutoff, actual.size());
  for (std::size_t r = 0; r < n; ++r) {
    const double discount = std::log2(static_cast<double>(r) + 2.0);
    dcg += actual[by_pred[r]] / discount;
    idcg += ideal[r] / discount;
  }
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

/// Scores `test` with any callable `(user_index, item_index) -> rating`.
/// NDCG averages over users with at least two test ratings and is absent when
/// no user qualifies.
template <typename Predictor>
EvalMetrics evaluate_with(const RatingDataset& test, Predictor&& predictor, std::size_t cutoff = 10) {
  if (test.empty()) throw Error("empty_dataset", "cannot evaluate on an empty test set");

  std::vector<std::vector<std::pair<double, double>>> per_user(test.user_count());
  double sq = 0.0;
  for (const auto& t : test.triples) {
    const double p = static_cast<double>(predictor(t.user, t.item));
    sq += (t.rating - p) * (t.rating - p);
    per_user[static_cast<std::size_t>(t.user)].emplace_back(t.rating, p);
  }

  EvalMetrics out;
  out.rmse = std::sqrt(sq / static_cast<double>(test.triples.size()));

  double ndcg_sum = 0.0;
  std::size_t qualifying = 0;
  std::vector<double> actual, predicted;
  for (const auto& rows : per_user) {
    if (rows.size() < 2) continue;
    actual.clear();
    predicted.clear();
    for (auto [a, p] : rows) {
      actual.push_back(a);
      predicted.push_back(p);
    }
    ndcg_sum += ndcg_at(actual, predicted, cutoff);
    ++qualifying;
  }
  if (qualifying > 0) out.ndcg_at_10 = ndcg_sum / static_cast<double>(qualifying);
  return out;
}

/// `test` must share the model's id universe (e.g. both halves of split_dataset).
template <typename Scalar>
EvalMetrics evaluate(const BasicFactorModel<Scalar>& m, const RatingDataset& test, std::size_t cutoff = 10) {
  return evaluate_with(
      test, [&](std::int32_t u, std::int32_t i) { return predict<Scalar>(m, u, i); }, cutoff);
}

}  // namespace lfg
