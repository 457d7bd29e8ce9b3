// Game server: trains the model at startup, then serves matchmaking and games
// over WebSocket (/ws) and the HTTP endpoints on one port.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "lfg/error.hpp"
#include "lfg/event_log.hpp"
#include "lfg/server/game_server.hpp"
#include "lfg/server/pipeline.hpp"
#include "lfg/server/transport.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Latent factor labeling game server"};
  lfg::server::PipelineConfig pipeline;
  lfg::GameConfig game;
  std::string listen = "0.0.0.0:8080", log_path = "events.jsonl";
  std::string ratings, catalog;

  app.add_option("--ratings", ratings, "Ratings CSV")->required();
  app.add_option("--catalog", catalog, "Item catalog (JSON lines)")->required();
  app.add_option("--factors", pipeline.training.factor_count, "Latent factors")->capture_default_str();
  app.add_option("--lambda", pipeline.training.reg_lambda, "L2 regularization")->capture_default_str();
  app.add_option("--iterations", pipeline.training.iterations, "SGD epochs")->capture_default_str();
  app.add_option("--learning-rate", pipeline.training.learning_rate, "Initial SGD step size")->capture_default_str();
  app.add_option("--set-size", pipeline.selection.set_size, "Representatives per factor")->capture_default_str();
  app.add_option("--listen", listen, "Address as HOST:PORT; port 0 picks a free one")->capture_default_str();
  app.add_option("--log", log_path, "Event log (JSON lines, appended)")->capture_default_str();
  app.add_option("--game-seconds", game.duration_s, "Game length")->capture_default_str();
  app.add_option("--items-per-round", game.items_per_round, "Items shown per round")->capture_default_str();
  app.add_option("--seed", game.seed, "Base seed for round draws")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "lfg_server: --listen must be HOST:PORT\n";
    return 2;
  }
  lfg::server::TransportOptions options;
  options.address = listen.substr(0, colon);
  try {
    options.port = static_cast<unsigned short>(std::stoul(listen.substr(colon + 1)));
  } catch (const std::exception&) {
    std::cerr << "lfg_server: bad port in --listen\n";
    return 2;
  }
  pipeline.ratings = ratings;
  pipeline.catalog = catalog;

  // Block termination signals before any thread starts so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    lfg::EventLog log(log_path);
    if (log.corrupt_records_on_open() > 0)
      std::cerr << "warning: skipped " << log.corrupt_records_on_open() << " corrupt records in " << log_path << "\n";
    lfg::server::GameServer server(log, game);

    std::vector<std::string> warnings;
    std::cerr << "training on " << ratings << "...\n";
    server.install_content(lfg::server::run_pipeline(pipeline, &warnings));
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    lfg::server::PipelineRunner runner([&server](auto snap) { server.install_content(std::move(snap)); });
    lfg::server::Transport transport(server, &runner, pipeline, lfg::server::system_clock_now, options);
    std::cout << "listening on " << options.address << ":" << transport.port() << std::endl;
    transport.start();

    int sig = 0;
    sigwait(&signals, &sig);
    transport.stop();
    runner.wait();
  } catch (const lfg::Error& e) {
    std::cerr << "lfg_server: " << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "lfg_server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
