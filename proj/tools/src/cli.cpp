#include <algorithm>
#include <functional>
#include <list>
#include <map>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "buzzcal/cli/commands.hpp"

namespace buzzcal::cli {

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calibration metrics, buzzpoints and match simulation for incremental QA"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::vector<std::string> channels;
  std::vector<std::string> threshold_specs;
  std::vector<std::string> grid;

  // Enumerated flags are read as strings and mapped after parsing.
  std::vector<std::function<void()>> apply_choices;
  std::list<std::string> choice_storage;
  auto add_choice = [&]<typename T>(const char* flag, T& target, const char* env, const char* help,
                                    std::map<std::string, T> names) {
    std::vector<std::string> keys;
    for (const auto& [k, _] : names) keys.push_back(k);
    std::string& raw = choice_storage.emplace_back();
    app.add_option(flag, raw, help)->envname(env)->check(CLI::IsMember(keys));
    apply_choices.push_back([&target, &raw, names = std::move(names)] {
      if (!raw.empty()) target = names.at(raw);
    });
  };

  auto path_opt = [&](const char* flag, std::filesystem::path& target, const char* env, const char* help) {
    app.add_option(flag, target, help)->envname(env);
  };
  path_opt("--questions", config.questions, "BUZZCAL_QUESTIONS", "questions.jsonl");
  path_opt("--traces", config.traces, "BUZZCAL_TRACES", "traces.jsonl");
  path_opt("--buzzes", config.buzzes, "BUZZCAL_BUZZES", "buzzes.jsonl");
  path_opt("--surveys", config.surveys, "BUZZCAL_SURVEYS", "surveys.jsonl");
  path_opt("--overrides", config.overrides, "BUZZCAL_OVERRIDES", "overrides.csv (qid,guess,correct)");
  path_opt("--schedule", config.schedule, "BUZZCAL_SCHEDULE", "schedule.jsonl for simulate");
  path_opt("--out", config.out, "BUZZCAL_OUT", "output directory");

  app.add_option("--channel", channels, "confidence channel(s): logit, verbalized (default both)")
      ->envname("BUZZCAL_CHANNEL")
      ->check(CLI::IsMember({"logit", "verbalized"}))
      ->delimiter(',');
  app.add_option("--threshold", threshold_specs, "buzz thresholds as model=value,...")
      ->envname("BUZZCAL_THRESHOLD");
  add_choice("--threshold-channel", config.threshold_channel, "BUZZCAL_THRESHOLD_CHANNEL",
             "field compared against thresholds",
             std::map<std::string, ThresholdChannel>{{"logprob_sum", ThresholdChannel::logprob_sum},
                                                     {"logit_conf", ThresholdChannel::logit_conf},
                                                     {"verbalized_conf", ThresholdChannel::verbalized_conf}});
  add_choice("--prompt-policy", config.prompt_policy, "BUZZCAL_PROMPT_POLICY", "scoring of prompt-on answers",
             std::map<std::string, PromptPolicy>{{"incorrect", PromptPolicy::incorrect},
                                                 {"correct", PromptPolicy::correct}});
  app.add_option("--bins", config.bins, "ECE bin count")->envname("BUZZCAL_BINS")->check(CLI::PositiveNumber);
  add_choice("--shq-mode", config.shq_mode, "BUZZCAL_SHQ_MODE", "human mass for SH_q",
             std::map<std::string, ShqHumanMode>{{"difference", ShqHumanMode::difference},
                                                 {"first_correct", ShqHumanMode::first_correct}});
  app.add_option("--penalty", config.penalty, "payoff penalty for an incorrect buzz")
      ->envname("BUZZCAL_PENALTY")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", config.seed, "random seed")->envname("BUZZCAL_SEED");
  app.add_option("--threads", config.threads, "worker threads")->envname("BUZZCAL_THREADS")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid, "threshold grid as from,to,step")
      ->envname("BUZZCAL_GRID")
      ->delimiter(',')
      ->expected(3);
  add_choice("--curve", config.curve, "BUZZCAL_CURVE", "human accuracy curve for threshold fitting",
             std::map<std::string, CurveSource>{{"empirical", CurveSource::empirical},
                                                {"polynomial", CurveSource::polynomial}});
  add_choice("--curve-orientation", config.curve_orientation, "BUZZCAL_CURVE_ORIENTATION",
             "meaning of the curve's values",
             std::map<std::string, CurveOrientation>{{"answered_by", CurveOrientation::answered_by},
                                                     {"not_answered_by", CurveOrientation::not_answered_by}});
  app.add_option("--position-step", config.position_step, "grid step over position fractions")
      ->envname("BUZZCAL_POSITION_STEP")
      ->check(CLI::Range(1e-6, 1.0));
  add_choice("--grouping", config.grouping, "BUZZCAL_GROUPING", "player grouping for survey analyses",
             std::map<std::string, Grouping>{{"auto", Grouping::automatic},
                                             {"halves", Grouping::halves},
                                             {"quartiles", Grouping::quartiles}});
  add_choice("--tie-rule", config.tie_rule, "BUZZCAL_TIE_RULE", "simultaneous buzz resolution",
             std::map<std::string, TieRule>{{"lower_team_id", TieRule::lower_team_id},
                                            {"alternating", TieRule::alternating}});

  using Command = int (*)(const RunConfig&, std::ostream&);
  std::vector<std::pair<CLI::App*, Command>> commands = {
      {app.add_subcommand("validate", "check inputs; exit 0 iff no violations"), cmd_validate},
      {app.add_subcommand("eval", "metrics.csv, per_question.csv, per_category.csv"), cmd_eval},
      {app.add_subcommand("buzz", "buzzpoints.jsonl from confidence thresholds"), cmd_buzz},
      {app.add_subcommand("threshold-fit", "threshold_fit.csv payoff table per model"), cmd_threshold_fit},
      {app.add_subcommand("simulate", "replay scheduled matches"), cmd_simulate},
      {app.add_subcommand("report", "human curves, rankings and plot-ready tables"), cmd_report},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }

  for (auto& apply : apply_choices) apply();
  if (!channels.empty()) {
    config.channels.clear();
    for (const auto& c : channels) {
      const Channel ch = *parse_channel(c);
      if (std::find(config.channels.begin(), config.channels.end(), ch) == config.channels.end()) {
        config.channels.push_back(ch);
      }
    }
  }
  for (const auto& spec : threshold_specs) {
    if (!config.thresholds.empty()) config.thresholds += ',';
    config.thresholds += spec;
  }
  if (!grid.empty()) {
    try {
      config.grid_from = std::stod(grid.at(0));
      config.grid_to = std::stod(grid.at(1));
      config.grid_step = std::stod(grid.at(2));
    } catch (const std::exception&) {
      err << "error: --grid expects three numbers from,to,step\n";
      return kExitIo;
    }
  }

  for (const auto& [sub, fn] : commands) {
    if (sub->parsed()) return fn(config, err);
  }
  return kExitIo;
}

}  // namespace buzzcal::cli
