// Offline model tooling: train, evaluate on a held-out split, and export
// representative items per factor.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lfg/error.hpp"
#include "lfg/factorization.hpp"
#include "lfg/ingest.hpp"
#include "lfg/model_io.hpp"
#include "lfg/representatives.hpp"

namespace {

void add_training_options(CLI::App* cmd, lfg::TrainingConfig& t) {
  cmd->add_option("--factors", t.factor_count, "Latent factors")->capture_default_str();
  cmd->add_option("--lambda", t.reg_lambda, "L2 regularization")->capture_default_str();
  cmd->add_option("--iterations", t.iterations, "SGD epochs")->capture_default_str();
  cmd->add_option("--learning-rate", t.learning_rate, "Initial step size")->capture_default_str();
  cmd->add_option("--lr-decay", t.lr_decay, "Step size multiplier per epoch")->capture_default_str();
  cmd->add_option("--seed", t.seed, "Initialization and shuffling seed")->capture_default_str();
}

lfg::RatingDataset load(const std::string& path) {
  std::vector<std::string> warnings;
  auto ds = lfg::load_ratings(path, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return ds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent factor model tooling"};
  app.require_subcommand(1);

  std::string ratings, model_path, out_path;
  lfg::TrainingConfig training;
  lfg::SelectionConfig selection;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 7;

  auto* train_cmd = app.add_subcommand("train", "Train on all ratings and save the model");
  train_cmd->add_option("--ratings", ratings, "Ratings CSV")->required();
  train_cmd->add_option("--out", out_path, "Model file")->required();
  add_training_options(train_cmd, training);

  auto* eval_cmd = app.add_subcommand("evaluate", "Train on a per-user split and report RMSE and NDCG@10");
  eval_cmd->add_option("--ratings", ratings, "Ratings CSV")->required();
  eval_cmd->add_option("--test-fraction", test_fraction, "Held-out share of each user's ratings")->capture_default_str();
  eval_cmd->add_option("--split-seed", split_seed, "Split seed")->capture_default_str();
  add_training_options(eval_cmd, training);

  auto* select_cmd = app.add_subcommand("select", "Export representative items per factor");
  select_cmd->add_option("--ratings", ratings, "Ratings CSV the model was trained on")->required();
  select_cmd->add_option("--model", model_path, "Model file")->required();
  select_cmd->add_option("--out", out_path, "Output TSV, '-' for stdout")->required();
  select_cmd->add_option("--set-size", selection.set_size, "Items per factor")->capture_default_str();
  select_cmd->add_option("--quantile", selection.candidate_quantile, "Candidate pool quantile")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto ds = load(ratings);
      const auto m = lfg::train<double>(ds, training, [](int epoch, const lfg::FactorModel&) {
        std::cerr << "epoch " << epoch << " done\n";
      });
      lfg::save_model_file(m, out_path);
    } else if (*eval_cmd) {
      const auto start = std::chrono::steady_clock::now();
      const auto [train_set, test_set] = lfg::split_dataset(load(ratings), test_fraction, split_seed);
      const auto m = lfg::train(train_set, training);
      const auto metrics = lfg::evaluate(m, test_set);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      nlohmann::json j = {{"rmse", metrics.rmse},
                          {"train_ratings", train_set.triples.size()},
                          {"test_ratings", test_set.triples.size()},
                          {"seconds", seconds}};
      j["ndcg_at_10"] = metrics.ndcg_at_10 ? nlohmann::json(*metrics.ndcg_at_10) : nlohmann::json(nullptr);
      std::cout << j.dump(2) << "\n";
    } else if (*select_cmd) {
      const auto ds = load(ratings);
      const auto m = lfg::load_model_file<double>(model_path);
      const auto reps = lfg::select_representatives(m, ds, selection);
      if (out_path == "-") {
        lfg::write_representatives(std::cout, reps);
      } else {
        std::ofstream out(out_path);
        lfg::write_representatives(out, reps);
        if (!out) throw lfg::Error("io", "cannot write " + out_path);
      }
    }
  } catch (const lfg::Error& e) {
    std::cerr << "lfg: " << e.code() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
