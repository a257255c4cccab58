#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "buzzcal/buzzer.hpp"
#include "buzzcal/types.hpp"

namespace buzzcal {

inline constexpr int kCorrectPoints = 10;
inline constexpr int kIncorrectPoints = -5;
inline constexpr std::size_t kMainQuestions = 20;
inline constexpr std::size_t kMaxTiebreakers = 3;

struct BuzzAttempt {
  double position = 1.0;  // fraction of words revealed
  int clue_index = 0;
  bool correct = false;
};

struct TeamTrace {
  std::string team_id;
  TeamKind kind = TeamKind::human;
  // qid -> attempts sorted by position. A question present with no attempts
  // means the team never buzzed on it.
  std::map<std::string, std::vector<BuzzAttempt>> attempts;

  void add(const std::string& qid, BuzzAttempt attempt);
  void cover(const std::string& qid) { attempts.try_emplace(qid); }
};

// Model team from precomputed buzzpoints; the buzz lands at the end of the
// buzzed clue. Every question in `questions` is covered.
TeamTrace model_team(const std::string& team_id, std::span<const Buzzpoint> buzzpoints,
                     std::span<const Question> questions);

// Human team from one match's buzz log.
TeamTrace human_team(const std::string& team_id, const std::string& match_id,
                     std::span<const BuzzRecord> buzzes, std::span<const Question> questions);

enum class TieRule { lower_team_id, alternating };

struct BuzzEvent {
  std::string qid;
  std::string team_id;
  double position = 0.0;
  int clue_index = 0;
  bool correct = false;
  int points = 0;
};

struct QuestionOutcome {
  std::string qid;
  bool tiebreaker = false;
  std::optional<std::string> winner;
  std::optional<double> buzz_position;  // position of the deciding correct buzz
  int points_a = 0;
  int points_b = 0;
  std::vector<BuzzEvent> events;
};

// `ordinal` feeds the alternating tie rule (even: lower team id wins the floor).
QuestionOutcome play_question(const Question& q, const TeamTrace& a, const TeamTrace& b,
                              TieRule tie_rule = TieRule::lower_team_id, int ordinal = 0);

struct MatchSet {
  std::vector<Question> main;
  std::vector<Question> tiebreakers;
};

struct MatchResult {
  std::string match_id;
  std::string team_a;
  std::string team_b;
  std::vector<QuestionOutcome> questions;
  int total_a = 0;
  int total_b = 0;
  bool tiebreaker_used = false;
  std::optional<std::string> winner;  // none: drawn
};

MatchResult play_match(const std::string& match_id, const MatchSet& set, const TeamTrace& a,
                       const TeamTrace& b, TieRule tie_rule = TieRule::lower_team_id);

nlohmann::json to_json(const MatchResult& result);

struct StandingRow {
  std::string team_id;
  int played = 0;
  int wins = 0;
  int draws = 0;
  int losses = 0;
  int points_for = 0;
  int points_against = 0;

  int differential() const { return points_for - points_against; }
};

std::vector<StandingRow> standings(std::span<const MatchResult> results);

}  // namespace buzzcal
