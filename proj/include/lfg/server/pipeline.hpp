#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "lfg/factorization.hpp"
#include "lfg/representatives.hpp"
#include "lfg/server/game_server.hpp"

namespace lfg::server {

struct PipelineConfig {
  std::filesystem::path ratings;
  std::filesystem::path catalog;
  TrainingConfig training;
  SelectionConfig selection;
};

/// Overrides fields of `base` from a JSON object with any of: ratings, catalog,
/// factors, lambda, iterations, learning_rate, lr_decay, seed, set_size.
/// Throws Error("bad_config") on wrong types or invalid values.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base);

/// Ingest, train on all ratings, and select representatives. Every selected
/// item must be present in the catalog.
std::shared_ptr<const ContentSnapshot> run_pipeline(const PipelineConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// Runs the pipeline on a background thread and hands the result to `install`.
/// A failed run leaves whatever was installed before untouched.
class PipelineRunner {
 public:
  using Installer = std::function<void(std::shared_ptr<const ContentSnapshot>)>;

  explicit PipelineRunner(Installer install) : install_(std::move(install)) {}
  ~PipelineRunner();
  PipelineRunner(const PipelineRunner&) = delete;
  PipelineRunner& operator=(const PipelineRunner&) = delete;

  /// False when a run is already in progress.
  bool start(PipelineConfig cfg);
  void wait();

  /// {"state": "idle"|"running"|"succeeded"|"failed", "runs": n, "version"?, "error"?}
  nlohmann::json status() const;

 private:
  Installer install_;
  mutable std::mutex mutex_;
  std::thread worker_;
  std::string state_ = "idle";
  int runs_ = 0;
  std::string version_;
  std::string error_;
};

}  // namespace lfg::server
