#include "buzzcal/cli/commands.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "buzzcal/csv.hpp"
#include "buzzcal/error.hpp"
#include "buzzcal/ingest.hpp"

namespace buzzcal::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string path_string(const fs::path& p) { return p.empty() ? std::string() : p.string(); }

std::string_view to_string(CurveSource c) {
  return c == CurveSource::empirical ? "empirical" : "polynomial";
}

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::automatic: return "auto";
    case Grouping::halves: return "halves";
    case Grouping::quartiles: return "quartiles";
  }
  return "auto";
}

// Output files are written whole and replaced, never appended.
class OutputFile {
 public:
  OutputFile(const fs::path& dir, const std::string& name) : path_(dir / name) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorKind::Io, "cannot write " + path_.string());
  }
  std::ostream& stream() { return out_; }
  ~OutputFile() { out_.close(); }

 private:
  fs::path path_;
  std::ofstream out_;
};

void prepare_out(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + config.out.string() + ": " + ec.message());
  OutputFile echo(config.out, "run_config.json");
  echo.stream() << config.to_json().dump(2) << '\n';
}

DatasetBundle load_bundle(const RunConfig& config, bool need_traces) {
  if (config.questions.empty()) throw Error(ErrorKind::Config, "--questions is required");
  if (need_traces && config.traces.empty()) throw Error(ErrorKind::Config, "--traces is required");
  DatasetBundle bundle;
  bundle.config.prompt_policy = config.prompt_policy;
  bundle.questions = parse_questions(config.questions);
  if (!config.traces.empty()) bundle.traces = parse_traces(config.traces);
  if (!config.buzzes.empty()) bundle.buzzes = parse_buzzes(config.buzzes);
  if (!config.surveys.empty()) bundle.surveys = parse_surveys(config.surveys);
  if (!config.overrides.empty()) bundle.overrides = parse_overrides(config.overrides);
  return bundle;
}

json violations_json(const ValidationReport& report) {
  json list = json::array();
  for (const auto& v : report.violations) {
    list.push_back({{"kind", std::string(to_string(v.kind))}, {"where", v.where}, {"message", v.message}});
  }
  return list;
}

// Loads, validates and resolves correctness. Writes validation_report.json when
// something is wrong and returns nullopt in that case.
std::optional<DatasetBundle> load_valid_bundle(const RunConfig& config, std::ostream& log,
                                               bool need_traces) {
  DatasetBundle bundle = load_bundle(config, need_traces);
  const ValidationReport report = bundle.validate();
  if (!report.ok()) {
    OutputFile f(config.out, "validation_report.json");
    f.stream() << json{{"ok", false}, {"violations", violations_json(report)}}.dump(2) << '\n';
    log << "validation failed: " << report.violations.size() << " violation(s), see "
        << (config.out / "validation_report.json").string() << '\n';
    return std::nullopt;
  }
  resolve_correctness(bundle);
  return bundle;
}

std::set<std::string> model_ids(const DatasetBundle& bundle) {
  std::set<std::string> ids;
  for (const auto& tr : bundle.traces) ids.insert(tr.model_id);
  return ids;
}

ThresholdTable thresholds(const RunConfig& config) {
  ThresholdTable table = ThresholdTable::parse(config.thresholds);
  table.channel = config.threshold_channel;
  return table;
}

BuzzThreshold require_threshold(const ThresholdTable& table, const std::string& model) {
  auto th = table.lookup(model);
  if (!th) {
    throw Error(ErrorKind::Config, "no buzz threshold for model " + model +
                                       "; pass --threshold " + model + "=<value>");
  }
  return *th;
}

// Buzzpoints for every trace, ordered by model then qid.
std::vector<Buzzpoint> all_buzzpoints(const DatasetBundle& bundle, const ThresholdTable& table) {
  std::vector<const GuessTrace*> traces;
  for (const auto& tr : bundle.traces) traces.push_back(&tr);
  std::sort(traces.begin(), traces.end(), [](const GuessTrace* a, const GuessTrace* b) {
    return std::tie(a->model_id, a->qid) < std::tie(b->model_id, b->qid);
  });
  std::map<std::string, BuzzThreshold> per_model;
  for (const auto& m : model_ids(bundle)) per_model.emplace(m, require_threshold(table, m));
  std::vector<Buzzpoint> out;
  for (const GuessTrace* tr : traces) out.push_back(find_buzzpoint(*tr, per_model.at(tr->model_id)));
  return out;
}

std::vector<BuzzRecord> human_buzzes(const DatasetBundle& bundle) {
  std::vector<BuzzRecord> out;
  for (const auto& b : bundle.buzzes) {
    if (b.team_kind == TeamKind::human) out.push_back(b);
  }
  return out;
}

std::map<std::string, int> question_lengths(const DatasetBundle& bundle) {
  std::map<std::string, int> out;
  for (const auto& q : bundle.questions) out[q.qid] = static_cast<int>(q.clues.size());
  return out;
}

template <typename Fn>
int guarded(const RunConfig& config, std::ostream& log, Fn&& body) {
  try {
    prepare_out(config);
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Io:
      case ErrorKind::Config:
        return kExitIo;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

struct ScheduledMatch {
  std::string match_id;
  std::string team_a;
  std::string team_b;
  std::vector<std::string> questions;
  std::vector<std::string> tiebreakers;
  std::string log_match_id;  // logged match supplying human buzzes
};

std::vector<ScheduledMatch> parse_schedule(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<ScheduledMatch> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json obj = json::parse(line);
      ScheduledMatch m;
      m.match_id = obj.at("match_id").get<std::string>();
      m.team_a = obj.at("team_a").get<std::string>();
      m.team_b = obj.at("team_b").get<std::string>();
      m.questions = obj.at("questions").get<std::vector<std::string>>();
      if (obj.contains("tiebreakers")) m.tiebreakers = obj.at("tiebreakers").get<std::vector<std::string>>();
      m.log_match_id = obj.value("log_match_id", m.match_id);
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::MalformedLine,
                  "schedule line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

json RunConfig::to_json() const {
  json channel_list = json::array();
  for (Channel c : channels) channel_list.push_back(std::string(buzzcal::to_string(c)));
  return {{"questions", path_string(questions)},
          {"traces", path_string(traces)},
          {"buzzes", path_string(buzzes)},
          {"surveys", path_string(surveys)},
          {"overrides", path_string(overrides)},
          {"schedule", path_string(schedule)},
          {"out", path_string(out)},
          {"channels", channel_list},
          {"thresholds", thresholds},
          {"threshold_channel", std::string(buzzcal::to_string(threshold_channel))},
          {"prompt_policy", std::string(buzzcal::to_string(prompt_policy))},
          {"bins", bins},
          {"shq_mode", std::string(buzzcal::to_string(shq_mode))},
          {"penalty", penalty},
          {"seed", seed},
          {"grid", {grid_from, grid_to, grid_step}},
          {"curve", std::string(cli::to_string(curve))},
          {"curve_orientation",
           curve_orientation == CurveOrientation::answered_by ? "answered_by" : "not_answered_by"},
          {"position_step", position_step},
          {"accuracy_bins", accuracy_bins},
          {"grouping", std::string(cli::to_string(grouping))},
          {"tie_rule", tie_rule == TieRule::lower_team_id ? "lower_team_id" : "alternating"}};
}

int cmd_validate(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    json report;
    int status = kExitOk;
    try {
      const DatasetBundle bundle = load_bundle(config, false);
      const ValidationReport v = bundle.validate();
      report = {{"ok", v.ok()}, {"violations", violations_json(v)}};
      status = v.ok() ? kExitOk : kExitFailure;
      log << (v.ok() ? "valid" : "invalid") << ": " << v.violations.size() << " violation(s)\n";
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Io || e.kind() == ErrorKind::Config) throw;
      // Records that cannot be parsed are reported like any other violation.
      report = {{"ok", false},
                {"violations", json::array({{{"kind", std::string(to_string(e.kind()))},
                                             {"where", ""},
                                             {"message", e.what()}}})}};
      status = kExitFailure;
      log << "invalid: " << e.what() << '\n';
    }
    OutputFile f(config.out, "validation_report.json");
    f.stream() << report.dump(2) << '\n';
    return status;
  });
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    auto bundle = load_valid_bundle(config, log, true);
    if (!bundle) return kExitFailure;
    ReportOptions options;
    options.ece_bins = config.bins;
    options.shq_mode = config.shq_mode;
    options.threads = config.threads;

    std::vector<MetricReport> reports;
    for (const auto& model : model_ids(*bundle)) {
      for (Channel ch : config.channels) reports.push_back(metric_report(*bundle, model, ch, options));
    }

    std::map<std::string, Category> categories;
    for (const auto& q : bundle->questions) categories.emplace(q.qid, q.category);

    OutputFile metrics(config.out, "metrics.csv");
    OutputFile per_question(config.out, "per_question.csv");
    OutputFile per_category(config.out, "per_category.csv");
    CsvWriter m(metrics.stream());
    CsvWriter pq(per_question.stream());
    CsvWriter pc(per_category.stream());
    m.row("model", "channel", "calscore_D", "mce_D", "ece", "brier", "sh_q_mean", "questions",
          "steps", "skipped_steps");
    pq.row("model", "channel", "qid", "category", "calscore", "mce", "sh_q", "n_clues");
    pc.row("model", "channel", "category", "calscore_D", "mce_D", "ece", "brier", "sh_q_mean",
           "questions", "steps");
    for (const auto& r : reports) {
      const std::string ch(to_string(r.confidence_channel));
      const auto& a = r.aggregate;
      m.row(r.model_id, ch, a.calscore_D, a.mce_D, a.ece, a.brier, a.sh_q_mean, a.questions,
            a.steps, r.skipped_steps);
      for (const auto& [qid, q] : r.per_question) {
        pq.row(r.model_id, ch, qid, std::string(to_string(categories.at(qid))), q.calscore, q.mce,
               q.sh_q, q.n_clues);
      }
      for (const auto& [cat, c] : r.per_category) {
        pc.row(r.model_id, ch, std::string(to_string(cat)), c.calscore_D, c.mce_D, c.ece, c.brier,
               c.sh_q_mean, c.questions, c.steps);
      }
      if (r.skipped_steps > 0) {
        log << "warning: " << r.model_id << "/" << ch << ": skipped " << r.skipped_steps
            << " step(s) with unparseable verbalized confidence\n";
      }
    }
    log << "evaluated " << reports.size() << " (model, channel) pair(s)\n";
    return kExitOk;
  });
}

int cmd_buzz(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    auto bundle = load_valid_bundle(config, log, true);
    if (!bundle) return kExitFailure;
    const auto points = all_buzzpoints(*bundle, thresholds(config));
    OutputFile f(config.out, "buzzpoints.jsonl");
    for (const auto& bp : points) f.stream() << to_json(bp).dump() << '\n';
    log << "wrote " << points.size() << " buzzpoint(s)\n";
    return kExitOk;
  });
}

int cmd_threshold_fit(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    auto bundle = load_valid_bundle(config, log, true);
    if (!bundle) return kExitFailure;
    HumanAccuracyCurve curve;
    if (config.curve == CurveSource::empirical) {
      curve = empirical_from_buzzes(human_buzzes(*bundle), config.position_step);
    }
    curve.orientation = config.curve_orientation;
    const auto grid = threshold_grid(config.grid_from, config.grid_to, config.grid_step);

    OutputFile f(config.out, "threshold_fit.csv");
    CsvWriter w(f.stream());
    w.row("model", "theta", "payoff", "buzzes", "correct_buzzes", "best");
    for (const auto& model : model_ids(*bundle)) {
      std::vector<GuessTrace> traces;
      for (const auto& tr : bundle->traces) {
        if (tr.model_id == model) traces.push_back(tr);
      }
      std::sort(traces.begin(), traces.end(),
                [](const GuessTrace& a, const GuessTrace& b) { return a.qid < b.qid; });
      const ThresholdFit fit = fit_threshold(traces, curve, grid, config.penalty, config.threshold_channel);
      for (const auto& row : fit.table) {
        w.row(model, row.theta, row.payoff, row.buzzes, row.correct_buzzes, row.theta == fit.best_theta);
      }
      log << model << ": best theta " << format_double(fit.best_theta) << " payoff "
          << format_double(fit.best_payoff) << '\n';
    }
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    if (config.schedule.empty()) throw Error(ErrorKind::Config, "--schedule is required");
    auto bundle = load_valid_bundle(config, log, false);
    if (!bundle) return kExitFailure;
    const auto schedule = parse_schedule(config.schedule);
    const auto models = model_ids(*bundle);
    const ThresholdTable table = thresholds(config);

    std::map<std::string, std::vector<Buzzpoint>> model_points;
    for (const auto& tr : bundle->traces) {
      model_points[tr.model_id].push_back(find_buzzpoint(tr, require_threshold(table, tr.model_id)));
    }

    std::vector<MatchResult> results;
    for (const auto& sm : schedule) {
      MatchSet set;
      std::vector<Question> all;
      auto fetch = [&](const std::string& qid) {
        const Question* q = bundle->find_question(qid);
        if (!q) throw Error(ErrorKind::ForeignQuestion, "schedule names unknown question " + qid);
        all.push_back(*q);
        return *q;
      };
      for (const auto& qid : sm.questions) set.main.push_back(fetch(qid));
      for (const auto& qid : sm.tiebreakers) set.tiebreakers.push_back(fetch(qid));
      auto team = [&](const std::string& id) {
        if (models.contains(id)) return model_team(id, model_points[id], all);
        return human_team(id, sm.log_match_id, bundle->buzzes, all);
      };
      results.push_back(play_match(sm.match_id, set, team(sm.team_a), team(sm.team_b), config.tie_rule));
    }

    OutputFile matches(config.out, "match_results.jsonl");
    OutputFile events(config.out, "buzz_events.jsonl");
    for (const auto& r : results) {
      matches.stream() << to_json(r).dump() << '\n';
      for (const auto& q : r.questions) {
        for (const auto& e : q.events) {
          events.stream() << json{{"match_id", r.match_id}, {"qid", e.qid},
                                  {"team", e.team_id},      {"position", e.position},
                                  {"t", e.clue_index},      {"correct", e.correct},
                                  {"points", e.points}}
                                 .dump()
                          << '\n';
        }
      }
    }
    OutputFile table_file(config.out, "standings.csv");
    CsvWriter w(table_file.stream());
    w.row("team_id", "played", "wins", "draws", "losses", "points_for", "points_against", "differential");
    for (const auto& row : standings(results)) {
      w.row(row.team_id, row.played, row.wins, row.draws, row.losses, row.points_for,
            row.points_against, row.differential());
    }
    log << "simulated " << results.size() << " match(es)\n";
    return kExitOk;
  });
}

int cmd_report(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    auto bundle = load_valid_bundle(config, log, false);
    if (!bundle) return kExitFailure;
    const auto humans = human_buzzes(*bundle);
    std::map<std::string, std::vector<BuzzRecord>> by_qid;
    std::map<std::string, std::vector<BuzzRecord>> by_team;
    std::map<std::string, std::set<std::string>> team_matches;
    std::set<std::string> all_matches;
    for (const auto& b : humans) {
      by_qid[b.qid].push_back(b);
      by_team[b.team_id].push_back(b);
      team_matches[b.team_id].insert(b.match_id);
      all_matches.insert(b.match_id);
    }

    {
      OutputFile f(config.out, "human_curves.csv");
      CsvWriter w(f.stream());
      w.row("qid", "t", "h", "support");
      for (const auto& q : bundle->questions) {
        const HumanCurve c = human_curve(q, by_qid[q.qid]);
        for (std::size_t t = 0; t < c.h.size(); ++t) w.row(q.qid, t, c.h[t], c.support[t]);
      }
    }

    {
      OutputFile f(config.out, "buzz_curves.csv");
      CsvWriter w(f.stream());
      w.row("group", "matches", "position", "correct_rate", "incorrect_rate");
      auto emit = [&](const std::string& group, std::span<const BuzzRecord> buzzes, int matches) {
        const auto c = cumulative_buzz_curve(buzzes, matches, config.position_step, group);
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
          w.row(group, matches, c.grid[i], c.correct_rate[i], c.incorrect_rate[i]);
        }
      };
      // Pooled over all human teams, normalized by team-match appearances.
      int appearances = 0;
      for (const auto& [_, ms] : team_matches) appearances += static_cast<int>(ms.size());
      emit("all_humans", humans, std::max(appearances, 1));
      for (const auto& [team, buzzes] : by_team) {
        emit(team, buzzes, static_cast<int>(team_matches[team].size()));
      }
    }

    const ThresholdTable table = thresholds(config);
    const auto lengths = question_lengths(*bundle);
    std::vector<PlayerRank> ranking;
    std::map<std::string, std::string> groups;
    if (!bundle->surveys.empty()) {
      ranking = rank_survey_players(bundle->surveys, lengths);
      groups = group_players(ranking, config.grouping);
    }

    {
      OutputFile f(config.out, "accuracy_by_clues.csv");
      CsvWriter w(f.stream());
      w.row("source", "group", "fraction", "accuracy");
      if (!bundle->traces.empty()) {
        for (const auto& row : accuracy_by_clues_revealed(bundle->traces, config.accuracy_bins)) {
          for (std::size_t i = 0; i < row.accuracy.size(); ++i) {
            w.row("model", row.group_id, config.accuracy_bins[i], row.accuracy[i]);
          }
        }
      }
      if (!bundle->surveys.empty()) {
        for (const auto& row :
             accuracy_by_clues_revealed(bundle->surveys, lengths, groups, config.accuracy_bins)) {
          for (std::size_t i = 0; i < row.accuracy.size(); ++i) {
            w.row("human", row.group_id, config.accuracy_bins[i], row.accuracy[i]);
          }
        }
      }
    }

    {
      // Models enter as pseudo-players: their "would buzz" is the buzzpoint.
      std::vector<SurveyResponse> responses(bundle->surveys.begin(), bundle->surveys.end());
      std::map<std::string, std::string> all_groups = groups;
      for (const auto& tr : bundle->traces) {
        auto th = table.lookup(tr.model_id);
        if (!th) continue;
        const Buzzpoint bp = find_buzzpoint(tr, *th);
        all_groups[tr.model_id] = tr.model_id;
        for (const auto& s : tr.steps) {
          responses.push_back({tr.model_id, tr.qid, s.t, s.guess,
                               s.correct == Correctness::correct, bp.t && *bp.t == s.t, {}});
        }
      }
      OutputFile f(config.out, "conditional_probs.csv");
      CsvWriter w(f.stream());
      w.row("group", "clues", "p_buzz_given_correct", "p_buzz_given_incorrect", "players_correct",
            "players_incorrect", "instances_correct", "instances_incorrect");
      for (const auto& stats : conditional_buzz_probs(responses, all_groups)) {
        for (const auto& c : stats.cells) {
          w.row(stats.group_id, c.clues, c.p_buzz_given_correct, c.p_buzz_given_incorrect,
                c.players_correct, c.players_incorrect, c.instances_correct, c.instances_incorrect);
        }
      }
    }

    {
      OutputFile f(config.out, "rankings.csv");
      CsvWriter w(f.stream());
      w.row("rank", "player_id", "score", "buzzed_questions", "mean_buzz_fraction", "quartile", "half");
      for (const auto& r : ranking) {
        w.row(r.rank, r.player_id, r.score, r.buzzed_questions, r.mean_buzz_fraction, r.quartile, r.half);
      }
    }
    log << "report written to " << config.out.string() << '\n';
    return kExitOk;
  });
}

}  // namespace buzzcal::cli
