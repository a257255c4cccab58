#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "buzzcal/types.hpp"

namespace buzzcal {

// h_t = correct buzzes with clue index <= t over all buzzes with clue index
// <= t; zero where no buzz has happened yet. Throws ForeignBuzz when a record
// belongs to another question.
HumanCurve human_curve(const Question& question, std::span<const BuzzRecord> buzzes);

// Cumulative buzz counts per match over a grid of position fractions.
struct CumulativeBuzzCurve {
  std::string group_id;
  std::vector<double> grid;
  std::vector<double> correct_rate;
  std::vector<double> incorrect_rate;
};

// Grid points are k * grid_step for k = 1.. with the last point pinned to 1.
std::vector<double> position_grid(double grid_step);

CumulativeBuzzCurve cumulative_buzz_curve(std::span<const BuzzRecord> buzzes, int matches_played,
                                          double grid_step, std::string group_id = {});

// Number of clues in the first `fraction` of an n-clue question, ceil(f * n).
int clues_revealed(double fraction, int n);

struct AccuracyRow {
  std::string group_id;
  std::vector<std::optional<double>> accuracy;  // one per bin; absent with no data
};

// One row per model.
std::vector<AccuracyRow> accuracy_by_clues_revealed(std::span<const GuessTrace> traces,
                                                    std::span<const double> bins);

// Per player, then averaged over each group in `groups` (player -> group).
// Questions missing the needed clue index are skipped for that player.
std::vector<AccuracyRow> accuracy_by_clues_revealed(std::span<const SurveyResponse> surveys,
                                                    const std::map<std::string, int>& question_lengths,
                                                    const std::map<std::string, std::string>& groups,
                                                    std::span<const double> bins);

struct ConditionalCell {
  int clues = 0;  // n, clues revealed
  std::optional<double> p_buzz_given_correct;
  std::optional<double> p_buzz_given_incorrect;
  int players_correct = 0;    // players contributing to the g=1 mean
  int players_incorrect = 0;  // players contributing to the g=0 mean
  int instances_correct = 0;
  int instances_incorrect = 0;
};

struct ConditionalBuzzStats {
  std::string group_id;
  std::vector<ConditionalCell> cells;  // ascending in clues
};

// Responses after a player's first would_buzz on a question are discarded.
std::vector<ConditionalBuzzStats> conditional_buzz_probs(
    std::span<const SurveyResponse> surveys, const std::map<std::string, std::string>& groups);

enum class Grouping { automatic, halves, quartiles };

struct PlayerRank {
  std::string player_id;
  double score = 0.0;
  int buzzed_questions = 0;
  std::optional<double> mean_buzz_fraction;
  int rank = 0;           // 1-based
  std::string quartile;   // "Q4" is the top quartile
  std::string half;       // "top" or "bottom"
};

// (20 - 20c) for a correct first buzz, -5 for an incorrect one, c being the
// share of clues seen. Ties: earlier mean buzz fraction, then player id.
std::vector<PlayerRank> rank_survey_players(std::span<const SurveyResponse> surveys,
                                            const std::map<std::string, int>& question_lengths);

// Player -> group label using the ranking. `automatic` picks halves below 12
// players and quartiles otherwise.
std::map<std::string, std::string> group_players(std::span<const PlayerRank> ranking,
                                                 Grouping grouping = Grouping::automatic);

}  // namespace buzzcal
