// Acceptance suite: one PASS/FAIL line per headline criterion. Exit status is
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "lfg/analysis.hpp"
#include "lfg/factorization.hpp"
#include "lfg/ingest.hpp"
#include "lfg/representatives.hpp"
#include "support/gradient_check.hpp"
#include "support/protocol_scenario.hpp"
#include "support/selection_oracle.hpp"
#include "support/synthetic.hpp"
#include "support/reference_log.hpp"

namespace {

using namespace lfg;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.passed) ++failures;
  std::printf("%s  %-34s %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool two_decimals(double value, double reference) { return std::abs(value - reference) < 0.005; }

Outcome reference_terms() {
  const auto t0 = Clock::now();
  const auto log = testing::make_reference_log();
  const auto descriptions = filter_good_labels(aggregate(log, 10), 2);
  std::set<std::string> terms;
  long matches = 0;
  for (const auto& d : descriptions)
    for (const auto& [term, n] : d.term_counts) {
      terms.insert(term);
      matches += n;
    }
  const double s = seconds_since(t0);
  std::ostringstream out;
  out << terms.size() << " terms (want 35), " << matches << " matches (want 325), " << fmt("%.3f s", s);
  return {terms.size() == 35 && matches == 325 && s < 1.0, out.str()};
}

Outcome similarity() {
  const auto t0 = Clock::now();
  const auto r = report(testing::make_reference_log(), AnalysisConfig{2, 10});
  const double s = seconds_since(t0);
  const double sim_8_10 = r.similarity(7, 9);
  double best = -1;
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = i + 1; j < 10; ++j) best = std::max(best, r.similarity(i, j));
  const double mean = r.mean_similarity.value_or(NAN);
  const bool ok = std::abs(sim_8_10 - 0.54) <= 0.02 && sim_8_10 == best && std::abs(mean - 0.09) <= 0.04 && s < 1.0;
  return {ok, "sim(8,10)=" + fmt("%.4f", sim_8_10) + (sim_8_10 == best ? " (max pair)" : " (NOT max)") +
                  ", mean=" + fmt("%.4f", mean) + ", sd=" + fmt("%.4f", r.sd_similarity.value_or(NAN)) + ", " +
                  fmt("%.3f s", s)};
}

Outcome ratios() {
  const auto t0 = Clock::now();
  const auto r = report(testing::make_reference_log(), AnalysisConfig{2, 10});
  const double s = seconds_since(t0);
  const double reference[] = {11.48, 10.74, 11.55, 11.53, 10.22, 8.92, 10.07, 8.76, 11.42, 10.68};
  int ratio_ok = 0;
  for (std::size_t f = 0; f < 10; ++f)
    if (r.factors[f].guess_match_ratio && two_decimals(*r.factors[f].guess_match_ratio, reference[f])) ++ratio_ok;
  const double g = r.expected_contribution_guesses.value_or(NAN);
  const double m = r.expected_contribution_matches.value_or(NAN);
  const bool ok = ratio_ok == 10 && two_decimals(g, 68.35) && two_decimals(m, 6.49) && r.total_guesses == 5741 &&
                  r.total_matches == 545 && r.player_count == 84 && s < 1.0;
  return {ok, std::to_string(ratio_ok) + "/10 ratios (f1 " + fmt("%.2f", *r.factors[0].guess_match_ratio) + ", f6 " +
                  fmt("%.2f", *r.factors[5].guess_match_ratio) + ", f9 " + fmt("%.2f", *r.factors[8].guess_match_ratio) +
                  "), contribution " + fmt("%.2f", g) + " guesses / " + fmt("%.2f", m) + " matches, " +
                  fmt("%.3f s", s)};
}

Outcome factorization() {
  std::ostringstream out;
  bool ok = true;

  // (a) planted rank-2, noiseless
  {
    const auto ds = testing::planted_dataset(60, 50, 2, 0.6, 3.5, 11);
    const auto [train_set, test_set] = split_dataset(ds, 0.2, 3);
    const double rmse = evaluate(train(train_set, testing::planted_config()), test_set).rmse;
    ok &= rmse < 0.1;
    out << "(a) planted test RMSE " << fmt("%.2e", rmse) << "; ";
  }
  // (b) objective across 16 epochs with the default hyper-parameters
  {
    const auto ds = testing::planted_dataset(80, 60, 3, 0.3, 3.5, 9, 0.4);
    TrainingConfig cfg;
    std::vector<double> objective;
    train<double>(ds, cfg, [&](int, const FactorModel& m) { objective.push_back(training_objective(m, ds, cfg.reg_lambda)); });
    double worst = -INFINITY;  // largest relative change between consecutive epochs
    for (std::size_t e = 1; e < objective.size(); ++e) worst = std::max(worst, objective[e] / objective[e - 1] - 1.0);
    const bool monotone = objective.size() == 16 && worst <= 0.01;
    ok &= monotone;
    out << "(b) largest epoch-to-epoch change " << fmt("%+.2e", worst) << "; ";
  }
  // (c) gradient check
  {
    const double err = testing::worst_gradient_error();
    ok &= err < 1e-4;
    out << "(c) gradient rel err " << fmt("%.1e", err) << "; ";
  }
  // Desk run: MovieLens-100K with the default configuration.
  {
    const auto path = std::filesystem::path(LFG_SOURCE_DIR) / "data/ml-100k/ratings.csv";
    if (!std::filesystem::exists(path)) {
      ok = false;
      out << "ML-100K missing at " << path.string() << " (run tools/ml100k_to_csv.py)";
    } else {
      const auto t0 = Clock::now();
      const auto [train_set, test_set] = split_dataset(load_ratings(path), 0.2, 7);
      const auto metrics = evaluate(train(train_set, TrainingConfig{}), test_set);
      const double s = seconds_since(t0);
      ok &= metrics.rmse <= 0.95 && s < 300.0;
      out << "ML-100K test RMSE " << fmt("%.4f", metrics.rmse) << " NDCG@10 " << fmt("%.4f", metrics.ndcg_at_10.value_or(NAN))
          << " in " << fmt("%.1f s", s);
    }
  }
  return {ok, out.str()};
}

Outcome representatives() {
  bool ok = true;
  int configs = 0;
  const auto m = testing::model_with_items({{0.9, -0.2}, {0.4, 1.1}, {1.3, 0.3}, {-0.5, 0.8}, {1.0, 1.0}, {0.2, -0.7}});
  const std::vector<std::int64_t> counts = {40, 3, 12, 90, 7, 25};
  const auto ds = testing::dataset_with_counts(m, counts);
  for (double q : {0.75, 0.3}) {
    for (int set_size : {2, 25}) {
      SelectionConfig cfg;
      cfg.candidate_quantile = q;
      cfg.set_size = set_size;
      const auto got = select_representatives(m, ds, cfg);
      const auto want = testing::brute_force_selection(m, counts, cfg);
      ++configs;
      for (std::size_t f = 0; f < 2; ++f) {
        const auto& a = got.factors[f];
        ok &= a.entries.size() == want.factors[f].entries.size();
        for (std::size_t j = 0; ok && j < a.entries.size(); ++j)
          ok &= a.entries[j].item_id == want.factors[f].entries[j].item_id &&
                std::abs(a.entries[j].score - want.factors[f].entries[j].score) < 1e-12;
        ok &= a.entries.size() == std::min<std::size_t>(a.pool_size, static_cast<std::size_t>(set_size));
        for (const auto& e : a.entries) ok &= m.item_factors(e.item, static_cast<Eigen::Index>(f)) >= a.threshold;
      }
    }
  }
  // Upper-quartile pool and list size on a trained model; identical across runs.
  const auto planted = testing::planted_dataset(120, 200, 3, 0.3, 3.5, 4, 0.3);
  TrainingConfig tc;
  tc.factor_count = 4;
  const auto m1 = train(planted, tc);
  const auto r1 = select_representatives(m1, planted, SelectionConfig{});
  const auto r2 = select_representatives(train(planted, tc), planted, SelectionConfig{});
  bool deterministic = r1.factors.size() == r2.factors.size();
  for (std::size_t f = 0; deterministic && f < r1.factors.size(); ++f) deterministic &= r1.factors[f].entries == r2.factors[f].entries;
  bool pool_ok = true;
  for (const auto& fr : r1.factors) {
    const auto pool = candidate_pool(m1.item_factors, fr.factor, 0.75);
    pool_ok &= fr.entries.size() == std::min<std::size_t>(pool.size(), 25);
    for (const auto& e : fr.entries) pool_ok &= std::find(pool.begin(), pool.end(), e.item) != pool.end();
  }
  ok &= deterministic && pool_ok;
  return {ok, std::to_string(configs) + " configs match brute force; pool membership " + (pool_ok ? "ok" : "VIOLATED") +
                  "; repeat run " + (deterministic ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  std::printf("latent factor game acceptance suite\n");
  criterion("reference log: 35 terms / 325", reference_terms);
  criterion("similarity reproduction", similarity);
  criterion("ratio/contribution reproduction", ratios);
  criterion("factorization properties", factorization);
  criterion("representative selection", representatives);

  const auto scenario = testing::run_protocol_scenario(LFG_ANALYZE_BIN);
  criterion("game protocol end-to-end", [&] {
    std::string failed;
    for (const auto& c : scenario.protocol)
      if (!c.passed) failed += (failed.empty() ? "" : "; ") + c.name + (c.detail.empty() ? "" : " [" + c.detail + "]");
    return Outcome{scenario.protocol_passed(),
                   failed.empty() ? std::to_string(scenario.protocol.size()) + " checks in " + fmt("%.2f s", scenario.seconds)
                                  : failed};
  });
  criterion("no-leak property", [&] {
    std::string detail;
    for (const auto& c : scenario.no_leak) detail += (detail.empty() ? "" : "; ") + c.name + " " + (c.passed ? "ok" : "FAILED") + (c.detail.empty() ? "" : " (" + c.detail + ")");
    return Outcome{scenario.no_leak_passed(), detail};
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
