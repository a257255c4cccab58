#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "buzzcal/answer_match.hpp"
#include "buzzcal/buzzer.hpp"
#include "buzzcal/human_stats.hpp"
#include "buzzcal/metrics.hpp"
#include "buzzcal/simulator.hpp"

namespace buzzcal::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or metric failure
inline constexpr int kExitIo = 2;       // I/O or configuration error

enum class CurveSource { empirical, polynomial };

struct RunConfig {
  std::filesystem::path questions;
  std::filesystem::path traces;
  std::filesystem::path buzzes;
  std::filesystem::path surveys;
  std::filesystem::path overrides;
  std::filesystem::path schedule;
  std::filesystem::path out = "out";

  std::vector<Channel> channels{Channel::logit, Channel::verbalized};
  std::string thresholds;  // "model=value,..."
  ThresholdChannel threshold_channel = ThresholdChannel::logprob_sum;
  PromptPolicy prompt_policy = PromptPolicy::incorrect;
  int bins = 10;
  ShqHumanMode shq_mode = ShqHumanMode::difference;
  double penalty = 0.5;
  std::uint64_t seed = 0;

  double grid_from = -1.0;
  double grid_to = 0.0;
  double grid_step = 0.01;
  CurveSource curve = CurveSource::empirical;
  CurveOrientation curve_orientation = CurveOrientation::answered_by;
  double position_step = 0.05;
  std::vector<double> accuracy_bins{0.2, 0.4, 0.6, 0.8, 1.0};
  Grouping grouping = Grouping::automatic;
  TieRule tie_rule = TieRule::lower_team_id;

  // Execution detail only; results never depend on it, so it is not echoed.
  int threads = 1;

  nlohmann::json to_json() const;
};

int cmd_validate(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_buzz(const RunConfig& config, std::ostream& log);
int cmd_threshold_fit(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace buzzcal::cli
