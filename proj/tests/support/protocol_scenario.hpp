#pragma once

// A scripted two-client game against the real server over WebSocket, used by
// both the end-to-end test and the acceptance binary.

#include <filesystem>
#include <string>
#include <vector>

namespace lfg::testing {

struct ScenarioCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::vector<ScenarioCheck> protocol;  // game flow and replay checks
  std::vector<ScenarioCheck> no_leak;   // traffic inspection
  double seconds = 0;
  std::size_t messages_captured = 0;

  bool protocol_passed() const;
  bool no_leak_passed() const;
};

/// `analyze_bin` is the analysis CLI used to replay the persisted log.
ScenarioResult run_protocol_scenario(const std::filesystem::path& analyze_bin);

}  // namespace lfg::testing
