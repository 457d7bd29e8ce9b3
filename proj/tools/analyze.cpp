// Offline analysis of a game event log: per-factor statistics, good-label
// descriptions, TF-IDF similarity. Writes the report as JSON.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lfg/analysis.hpp"
#include "lfg/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Summarize a game event log into factor descriptions and similarities"};
  std::string log_path, out_path = "-";
  lfg::AnalysisConfig cfg;
  int factors = 0;
  app.add_option("--log", log_path, "Event log (JSON lines)")->required();
  app.add_option("--threshold", cfg.good_label_threshold, "Minimum matches for a term to describe a factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", out_path, "Report path, '-' for stdout")->capture_default_str();
  app.add_option("--factors", factors, "Number of factors (default: highest id in the log + 1)")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  if (factors > 0) cfg.factor_count = factors;

  try {
    const auto log = lfg::read_event_log(log_path);
    if (log.corrupt_records > 0) std::cerr << "warning: skipped " << log.corrupt_records << " corrupt records\n";
    const std::string text = lfg::to_json(lfg::report(log, cfg)).dump(2) + "\n";
    if (out_path == "-") {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      out << text;
      if (!out) throw lfg::Error("io", "cannot write " + out_path);
    }
  } catch (const lfg::Error& e) {
    std::cerr << "analyze: " << e.code() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
