#include "lfg/server/pipeline.hpp"

#include "lfg/error.hpp"
#include "lfg/ingest.hpp"

namespace lfg::server {

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig cfg) {
  if (!j.is_object()) throw Error("bad_config", "pipeline config must be a JSON object");
  try {
    if (j.contains("ratings")) cfg.ratings = j.at("ratings").get<std::string>();
    if (j.contains("catalog")) cfg.catalog = j.at("catalog").get<std::string>();
    if (j.contains("factors")) cfg.training.factor_count = j.at("factors").get<int>();
    if (j.contains("lambda")) cfg.training.reg_lambda = j.at("lambda").get<double>();
    if (j.contains("iterations")) cfg.training.iterations = j.at("iterations").get<int>();
    if (j.contains("learning_rate")) cfg.training.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("lr_decay")) cfg.training.lr_decay = j.at("lr_decay").get<double>();
    if (j.contains("seed")) cfg.training.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("set_size")) cfg.selection.set_size = j.at("set_size").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad_config", e.what());
  }
  cfg.training.validate();
  cfg.selection.validate();
  return cfg;
}

std::shared_ptr<const ContentSnapshot> run_pipeline(const PipelineConfig& cfg, std::vector<std::string>* warnings) {
  const RatingDataset ratings = load_ratings(cfg.ratings, warnings);
  Catalog catalog = load_catalog(cfg.catalog, warnings);
  attach_rating_counts(catalog, ratings);
  const FactorModel model = train(ratings, cfg.training);

  auto snap = std::make_shared<ContentSnapshot>();
  snap->representatives = select_representatives(model, ratings, cfg.selection);
  for (const auto& f : snap->representatives.factors)
    for (const auto& e : f.entries)
      if (!catalog.contains(e.item_id))
        throw Error("missing_item", "representative item " + std::to_string(e.item_id) + " is not in the catalog");
  snap->catalog = std::move(catalog);
  snap->version = "k" + std::to_string(cfg.training.factor_count) + "-seed" + std::to_string(cfg.training.seed) + "-" +
                  std::to_string(ratings.triples.size()) + "r";
  return snap;
}

PipelineRunner::~PipelineRunner() { wait(); }

bool PipelineRunner::start(PipelineConfig cfg) {
  std::lock_guard lock(mutex_);
  if (state_ == "running") return false;
  if (worker_.joinable()) worker_.join();
  state_ = "running";
  ++runs_;
  worker_ = std::thread([this, cfg = std::move(cfg)] {
    try {
      auto snap = run_pipeline(cfg);
      install_(snap);
      std::lock_guard lock(mutex_);
      state_ = "succeeded";
      version_ = snap->version;
      error_.clear();
    } catch (const std::exception& e) {
      std::lock_guard lock(mutex_);
      state_ = "failed";
      error_ = e.what();
    }
  });
  return true;
}

void PipelineRunner::wait() {
  std::thread t;
  {
    std::lock_guard lock(mutex_);
    t = std::move(worker_);
  }
  if (t.joinable()) t.join();
}

nlohmann::json PipelineRunner::status() const {
  std::lock_guard lock(mutex_);
  nlohmann::json j = {{"state", state_}, {"runs", runs_}};
  if (!version_.empty()) j["version"] = version_;
  if (state_ == "failed") j["error"] = error_;
  return j;
}

}  // namespace lfg::server
