#include "buzzcal/human_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "buzzcal/error.hpp"

namespace buzzcal {
namespace {

constexpr double kGridTolerance = 1e-12;

void check_bins(std::span<const double> bins) {
  if (bins.empty()) throw Error(ErrorKind::EmptyInput, "no accuracy bins");
  double prev = 0.0;
  for (double f : bins) {
    if (!(f > prev && f <= 1.0)) {
      throw Error(ErrorKind::Domain, "bins must be strictly increasing in (0,1]");
    }
    prev = f;
  }
}

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

HumanCurve human_curve(const Question& question, std::span<const BuzzRecord> buzzes) {
  const std::size_t n = question.clues.size();
  std::vector<int> correct_at(n, 0);
  std::vector<int> total_at(n, 0);
  for (const auto& b : buzzes) {
    if (b.qid != question.qid) {
      throw Error(ErrorKind::ForeignBuzz, "buzz for " + b.qid + " given to " + question.qid);
    }
    if (b.t < 0 || static_cast<std::size_t>(b.t) >= n) {
      throw Error(ErrorKind::Domain, "buzz clue index " + std::to_string(b.t) + " outside " +
                                         question.qid);
    }
    ++total_at[static_cast<std::size_t>(b.t)];
    if (b.correct) ++correct_at[static_cast<std::size_t>(b.t)];
  }
  HumanCurve curve{question.qid, std::vector<double>(n, 0.0), std::vector<int>(n, 0)};
  int correct = 0;
  int total = 0;
  for (std::size_t t = 0; t < n; ++t) {
    correct += correct_at[t];
    total += total_at[t];
    curve.support[t] = total;
    curve.h[t] = total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
  return curve;
}

std::vector<double> position_grid(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw Error(ErrorKind::Domain, "grid_step must lie in (0,1]");
  }
  const auto points = static_cast<std::size_t>(std::ceil(1.0 / grid_step - 1e-9));
  std::vector<double> grid;
  grid.reserve(points);
  for (std::size_t k = 1; k <= points; ++k) {
    grid.push_back(std::min(1.0, static_cast<double>(k) * grid_step));
  }
  grid.back() = 1.0;
  return grid;
}

CumulativeBuzzCurve cumulative_buzz_curve(std::span<const BuzzRecord> buzzes, int matches_played,
                                          double grid_step, std::string group_id) {
  if (matches_played < 1) throw Error(ErrorKind::ZeroMatches, "matches_played must be >= 1");
  CumulativeBuzzCurve curve;
  curve.group_id = std::move(group_id);
  curve.grid = position_grid(grid_step);

  std::vector<double> correct_pos;
  std::vector<double> incorrect_pos;
  for (const auto& b : buzzes) (b.correct ? correct_pos : incorrect_pos).push_back(b.position_frac);
  std::sort(correct_pos.begin(), correct_pos.end());
  std::sort(incorrect_pos.begin(), incorrect_pos.end());

  const double denom = static_cast<double>(matches_played);
  auto count_upto = [](const std::vector<double>& sorted, double p) {
    return static_cast<double>(
        std::upper_bound(sorted.begin(), sorted.end(), p + kGridTolerance) - sorted.begin());
  };
  for (double p : curve.grid) {
    curve.correct_rate.push_back(count_upto(correct_pos, p) / denom);
    curve.incorrect_rate.push_back(count_upto(incorrect_pos, p) / denom);
  }
  return curve;
}

int clues_revealed(double fraction, int n) {
  // The tolerance keeps products like 0.6 * 5 = 3.0000000000000004 at 3.
  const int k = static_cast<int>(std::ceil(fraction * n - 1e-9));
  return std::clamp(k, 1, n);
}

std::vector<AccuracyRow> accuracy_by_clues_revealed(std::span<const GuessTrace> traces,
                                                    std::span<const double> bins) {
  check_bins(bins);
  if (traces.empty()) throw Error(ErrorKind::EmptyInput, "no traces");
  std::map<std::string, std::vector<const GuessTrace*>> by_model;
  for (const auto& tr : traces) by_model[tr.model_id].push_back(&tr);

  std::vector<AccuracyRow> rows;
  for (const auto& [model, list] : by_model) {
    AccuracyRow row{model, {}};
    for (double f : bins) {
      int hits = 0;
      int total = 0;
      for (const GuessTrace* tr : list) {
        const int n = static_cast<int>(tr->steps.size());
        if (n == 0) continue;
        const int idx = clues_revealed(f, n) - 1;
        auto it = std::find_if(tr->steps.begin(), tr->steps.end(),
                               [idx](const GuessStep& s) { return s.t == idx; });
        if (it == tr->steps.end()) continue;
        if (it->correct == Correctness::unresolved) {
          throw Error(ErrorKind::UnresolvedCorrectness, "qid " + tr->qid + " model " + model);
        }
        ++total;
        if (it->correct == Correctness::correct) ++hits;
      }
      row.accuracy.push_back(total == 0 ? std::nullopt
                                        : std::optional<double>(static_cast<double>(hits) / total));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AccuracyRow> accuracy_by_clues_revealed(std::span<const SurveyResponse> surveys,
                                                    const std::map<std::string, int>& question_lengths,
                                                    const std::map<std::string, std::string>& groups,
                                                    std::span<const double> bins) {
  check_bins(bins);
  if (surveys.empty()) throw Error(ErrorKind::EmptyInput, "no survey responses");

  // (player, qid) -> t -> correct
  std::map<std::pair<std::string, std::string>, std::map<int, bool>> answers;
  for (const auto& s : surveys) answers[{s.player_id, s.qid}][s.t] = s.correct;

  // group -> bin -> per-player accuracies
  std::map<std::string, std::vector<std::vector<double>>> per_group;
  std::map<std::string, std::vector<std::pair<int, int>>> per_player;  // bin -> (hits, total)
  for (const auto& [key, by_t] : answers) {
    const auto& [player, qid] = key;
    auto len = question_lengths.find(qid);
    if (len == question_lengths.end()) continue;
    auto& counts = per_player[player];
    counts.resize(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
      auto it = by_t.find(clues_revealed(bins[b], len->second) - 1);
      if (it == by_t.end()) continue;
      ++counts[b].second;
      if (it->second) ++counts[b].first;
    }
  }
  for (const auto& [player, counts] : per_player) {
    auto g = groups.find(player);
    if (g == groups.end()) continue;
    auto& cells = per_group[g->second];
    cells.resize(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (counts[b].second > 0) {
        cells[b].push_back(static_cast<double>(counts[b].first) / counts[b].second);
      }
    }
  }
  std::vector<AccuracyRow> rows;
  for (const auto& [group, cells] : per_group) {
    AccuracyRow row{group, {}};
    for (const auto& c : cells) row.accuracy.push_back(mean_of(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConditionalBuzzStats> conditional_buzz_probs(
    std::span<const SurveyResponse> surveys, const std::map<std::string, std::string>& groups) {
  // (player, qid) -> t -> response
  std::map<std::pair<std::string, std::string>, std::map<int, const SurveyResponse*>> seqs;
  for (const auto& s : surveys) seqs[{s.player_id, s.qid}][s.t] = &s;

  struct Counts {
    int correct = 0, buzz_correct = 0, incorrect = 0, buzz_incorrect = 0;
  };
  // player -> n -> counts
  std::map<std::string, std::map<int, Counts>> per_player;
  for (const auto& [key, by_t] : seqs) {
    auto& table = per_player[key.first];
    for (const auto& [t, r] : by_t) {
      Counts& c = table[t + 1];
      if (r->correct) {
        ++c.correct;
        if (r->would_buzz) ++c.buzz_correct;
      } else {
        ++c.incorrect;
        if (r->would_buzz) ++c.buzz_incorrect;
      }
      if (r->would_buzz) break;  // nothing after the first buzz counts
    }
  }

  struct Acc {
    std::vector<double> pc, pi;
    int ic = 0, ii = 0;
  };
  std::map<std::string, std::map<int, Acc>> per_group;
  for (const auto& [player, table] : per_player) {
    auto g = groups.find(player);
    if (g == groups.end()) continue;
    auto& cells = per_group[g->second];
    for (const auto& [n, c] : table) {
      Acc& a = cells[n];
      if (c.correct > 0) {
        a.pc.push_back(static_cast<double>(c.buzz_correct) / c.correct);
        a.ic += c.correct;
      }
      if (c.incorrect > 0) {
        a.pi.push_back(static_cast<double>(c.buzz_incorrect) / c.incorrect);
        a.ii += c.incorrect;
      }
    }
  }

  std::vector<ConditionalBuzzStats> out;
  for (const auto& [group, cells] : per_group) {
    ConditionalBuzzStats stats{group, {}};
    for (const auto& [n, a] : cells) {
      ConditionalCell cell;
      cell.clues = n;
      cell.p_buzz_given_correct = mean_of(a.pc);
      cell.p_buzz_given_incorrect = mean_of(a.pi);
      cell.players_correct = static_cast<int>(a.pc.size());
      cell.players_incorrect = static_cast<int>(a.pi.size());
      cell.instances_correct = a.ic;
      cell.instances_incorrect = a.ii;
      stats.cells.push_back(cell);
    }
    out.push_back(std::move(stats));
  }
  return out;
}

std::vector<PlayerRank> rank_survey_players(std::span<const SurveyResponse> surveys,
                                            const std::map<std::string, int>& question_lengths) {
  // (player, qid) -> first buzzed response, chosen by smallest t.
  std::map<std::string, std::map<std::string, const SurveyResponse*>> first_buzz;
  std::set<std::string> players;
  for (const auto& s : surveys) {
    players.insert(s.player_id);
    if (!s.would_buzz) continue;
    auto& slot = first_buzz[s.player_id][s.qid];
    if (slot == nullptr || s.t < slot->t) slot = &s;
  }

  std::vector<PlayerRank> ranking;
  for (const auto& player : players) {
    PlayerRank r;
    r.player_id = player;
    double fraction_sum = 0.0;
    auto it = first_buzz.find(player);
    if (it != first_buzz.end()) {
      // Iterating a map keyed by qid fixes the summation order.
      for (const auto& [qid, resp] : it->second) {
        auto len = question_lengths.find(qid);
        if (len == question_lengths.end() || len->second <= 0) continue;
        const double c = static_cast<double>(resp->t + 1) / len->second;
        r.score += resp->correct ? 20.0 - 20.0 * c : -5.0;
        fraction_sum += c;
        ++r.buzzed_questions;
      }
    }
    if (r.buzzed_questions > 0) r.mean_buzz_fraction = fraction_sum / r.buzzed_questions;
    ranking.push_back(std::move(r));
  }

  std::sort(ranking.begin(), ranking.end(), [](const PlayerRank& a, const PlayerRank& b) {
    const double inf = std::numeric_limits<double>::infinity();
    return std::make_tuple(-a.score, a.mean_buzz_fraction.value_or(inf), a.player_id) <
           std::make_tuple(-b.score, b.mean_buzz_fraction.value_or(inf), b.player_id);
  });
  const std::size_t n = ranking.size();
  for (std::size_t i = 0; i < n; ++i) {
    ranking[i].rank = static_cast<int>(i + 1);
    ranking[i].quartile = "Q" + std::to_string(4 - (4 * i) / n);
    ranking[i].half = i < (n + 1) / 2 ? "top" : "bottom";
  }
  return ranking;
}

std::map<std::string, std::string> group_players(std::span<const PlayerRank> ranking,
                                                 Grouping grouping) {
  if (grouping == Grouping::automatic) {
    grouping = ranking.size() < 12 ? Grouping::halves : Grouping::quartiles;
  }
  std::map<std::string, std::string> out;
  for (const auto& r : ranking) {
    out[r.player_id] = grouping == Grouping::halves ? r.half : r.quartile;
  }
  return out;
}

}  // namespace buzzcal
