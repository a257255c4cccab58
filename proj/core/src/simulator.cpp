#include "buzzcal/simulator.hpp"

#include <algorithm>
#include <tuple>

#include "buzzcal/error.hpp"

namespace buzzcal {

void TeamTrace::add(const std::string& qid, BuzzAttempt attempt) {
  auto& list = attempts[qid];
  auto pos = std::upper_bound(list.begin(), list.end(), attempt.position,
                              [](double p, const BuzzAttempt& a) { return p < a.position; });
  list.insert(pos, attempt);
}

TeamTrace model_team(const std::string& team_id, std::span<const Buzzpoint> buzzpoints,
                     std::span<const Question> questions) {
  TeamTrace team{team_id, TeamKind::model, {}};
  std::map<std::string, const Question*> by_qid;
  for (const auto& q : questions) {
    by_qid.emplace(q.qid, &q);
    team.cover(q.qid);
  }
  for (const auto& bp : buzzpoints) {
    if (!bp.t) continue;
    auto it = by_qid.find(bp.qid);
    if (it == by_qid.end()) continue;
    if (bp.correct == Correctness::unresolved) {
      throw Error(ErrorKind::UnresolvedCorrectness, "buzzpoint for " + bp.qid + " is unresolved");
    }
    const auto spans = clue_word_spans(*it->second);
    if (*bp.t < 0 || static_cast<std::size_t>(*bp.t) >= spans.size()) {
      throw Error(ErrorKind::Domain, "buzzpoint clue index outside " + bp.qid);
    }
    team.add(bp.qid, {spans[static_cast<std::size_t>(*bp.t)].second, *bp.t,
                      bp.correct == Correctness::correct});
  }
  return team;
}

TeamTrace human_team(const std::string& team_id, const std::string& match_id,
                     std::span<const BuzzRecord> buzzes, std::span<const Question> questions) {
  TeamTrace team{team_id, TeamKind::human, {}};
  for (const auto& q : questions) team.cover(q.qid);
  for (const auto& b : buzzes) {
    if (b.team_id != team_id || b.match_id != match_id) continue;
    if (!team.attempts.contains(b.qid)) continue;
    team.add(b.qid, {b.position_frac, b.t, b.correct});
  }
  return team;
}

QuestionOutcome play_question(const Question& q, const TeamTrace& a, const TeamTrace& b,
                              TieRule tie_rule, int ordinal) {
  auto ia = a.attempts.find(q.qid);
  auto ib = b.attempts.find(q.qid);
  if (ia == a.attempts.end() || ib == b.attempts.end()) {
    throw Error(ErrorKind::ForeignQuestion,
                "question " + q.qid + " not covered by " + (ia == a.attempts.end() ? a.team_id : b.team_id));
  }

  QuestionOutcome out;
  out.qid = q.qid;

  // A team's first attempt is its buzz; after an incorrect answer it is
  // locked out, so later logged attempts never reach the moderator.
  struct Pending {
    const TeamTrace* team;
    const BuzzAttempt* attempt;
    int* points;
  };
  std::vector<Pending> pending;
  if (!ia->second.empty()) pending.push_back({&a, &ia->second.front(), &out.points_a});
  if (!ib->second.empty()) pending.push_back({&b, &ib->second.front(), &out.points_b});

  const bool lower_first = tie_rule == TieRule::lower_team_id || ordinal % 2 == 0;
  std::sort(pending.begin(), pending.end(), [lower_first](const Pending& x, const Pending& y) {
    if (x.attempt->position != y.attempt->position) return x.attempt->position < y.attempt->position;
    return lower_first ? x.team->team_id < y.team->team_id : x.team->team_id > y.team->team_id;
  });

  for (const Pending& p : pending) {
    const int points = p.attempt->correct ? kCorrectPoints : kIncorrectPoints;
    *p.points += points;
    out.events.push_back({q.qid, p.team->team_id, p.attempt->position, p.attempt->clue_index,
                          p.attempt->correct, points});
    if (p.attempt->correct) {
      out.winner = p.team->team_id;
      out.buzz_position = p.attempt->position;
      break;
    }
  }
  return out;
}

MatchResult play_match(const std::string& match_id, const MatchSet& set, const TeamTrace& a,
                       const TeamTrace& b, TieRule tie_rule) {
  if (set.main.size() != kMainQuestions) {
    throw Error(ErrorKind::WrongSetSize, "match needs " + std::to_string(kMainQuestions) +
                                             " questions, got " + std::to_string(set.main.size()));
  }
  if (set.tiebreakers.size() > kMaxTiebreakers) {
    throw Error(ErrorKind::WrongSetSize, "at most " + std::to_string(kMaxTiebreakers) +
                                             " tiebreakers, got " + std::to_string(set.tiebreakers.size()));
  }
  if (a.team_id == b.team_id) throw Error(ErrorKind::Config, "a team cannot play itself");

  MatchResult result;
  result.match_id = match_id;
  result.team_a = a.team_id;
  result.team_b = b.team_id;
  int ordinal = 0;
  auto play = [&](const Question& q, bool tiebreaker) {
    QuestionOutcome o = play_question(q, a, b, tie_rule, ordinal++);
    o.tiebreaker = tiebreaker;
    result.total_a += o.points_a;
    result.total_b += o.points_b;
    result.questions.push_back(std::move(o));
  };
  for (const auto& q : set.main) play(q, false);
  for (const auto& q : set.tiebreakers) {
    if (result.total_a != result.total_b) break;
    result.tiebreaker_used = true;
    play(q, true);
  }
  if (result.total_a > result.total_b) result.winner = a.team_id;
  if (result.total_b > result.total_a) result.winner = b.team_id;
  return result;
}

nlohmann::json to_json(const MatchResult& r) {
  using nlohmann::json;
  json questions = json::array();
  for (const auto& q : r.questions) {
    questions.push_back({{"qid", q.qid},
                         {"tiebreaker", q.tiebreaker},
                         {"winner", q.winner ? json(*q.winner) : json(nullptr)},
                         {"buzz_position", q.buzz_position ? json(*q.buzz_position) : json(nullptr)},
                         {"points", {{r.team_a, q.points_a}, {r.team_b, q.points_b}}}});
  }
  return {{"match_id", r.match_id},
          {"team_a", r.team_a},
          {"team_b", r.team_b},
          {"questions", std::move(questions)},
          {"totals", {{r.team_a, r.total_a}, {r.team_b, r.total_b}}},
          {"tiebreaker_used", r.tiebreaker_used},
          {"winner", r.winner ? json(*r.winner) : json(nullptr)}};
}

std::vector<StandingRow> standings(std::span<const MatchResult> results) {
  std::map<std::string, StandingRow> rows;
  auto tally = [&rows](const std::string& team, int pf, int pa, const std::optional<std::string>& winner) {
    StandingRow& row = rows[team];
    row.team_id = team;
    ++row.played;
    row.points_for += pf;
    row.points_against += pa;
    if (!winner) {
      ++row.draws;
    } else if (*winner == team) {
      ++row.wins;
    } else {
      ++row.losses;
    }
  };
  for (const auto& r : results) {
    tally(r.team_a, r.total_a, r.total_b, r.winner);
    tally(r.team_b, r.total_b, r.total_a, r.winner);
  }
  std::vector<StandingRow> out;
  for (auto& [_, row] : rows) out.push_back(row);
  std::sort(out.begin(), out.end(), [](const StandingRow& x, const StandingRow& y) {
    return std::make_tuple(-x.wins, -x.differential(), x.team_id) <
           std::make_tuple(-y.wins, -y.differential(), y.team_id);
  });
  return out;
}

}  // namespace buzzcal
