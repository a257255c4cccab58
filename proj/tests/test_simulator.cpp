#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "buzzcal/buzzer.hpp"
#include "buzzcal/error.hpp"
#include "buzzcal/ingest.hpp"
#include "buzzcal/simulator.hpp"
#include "generators.hpp"

using namespace buzzcal;

namespace {

const std::filesystem::path kScripted = std::filesystem::path(BUZZCAL_FIXTURE_DIR) / "scripted_match";

TeamTrace team(const std::string& id, const std::vector<std::string>& qids) {
  TeamTrace tt;
  tt.team_id = id;
  for (const auto& q : qids) tt.cover(q);
  return tt;
}

MatchSet numbered_set(int main, int tiebreakers) {
  MatchSet set;
  for (int i = 0; i < main; ++i) set.main.push_back(gen::question("m" + std::to_string(i), 4));
  for (int i = 0; i < tiebreakers; ++i) set.tiebreakers.push_back(gen::question("t" + std::to_string(i), 4));
  return set;
}

std::vector<std::string> qids_of(const MatchSet& set) {
  std::vector<std::string> out;
  for (const auto& q : set.main) out.push_back(q.qid);
  for (const auto& q : set.tiebreakers) out.push_back(q.qid);
  return out;
}

struct Scripted {
  std::vector<Question> questions;
  std::vector<BuzzRecord> buzzes;
  MatchSet set;
};

Scripted load_scripted() {
  Scripted s;
  s.questions = parse_questions(kScripted / "questions.jsonl");
  s.buzzes = parse_buzzes(kScripted / "buzzes.jsonl");
  for (std::size_t i = 0; i < s.questions.size(); ++i) {
    (i < 20 ? s.set.main : s.set.tiebreakers).push_back(s.questions[i]);
  }
  return s;
}

}  // namespace

TEST(PlayQuestion, IncorrectInterruptThenOpponentConverts) {
  const auto q = gen::question("q", 4);
  auto a = team("a", {"q"});
  auto b = team("b", {"q"});
  a.add("q", {0.25, 0, false});
  b.add("q", {0.75, 2, true});
  const auto out = play_question(q, a, b);
  EXPECT_EQ(out.points_a, -5);
  EXPECT_EQ(out.points_b, 10);
  EXPECT_EQ(out.winner, "b");
  EXPECT_EQ(out.buzz_position, 0.75);
  EXPECT_EQ(out.events.size(), 2u);
}

TEST(PlayQuestion, NobodyBuzzes) {
  const auto q = gen::question("q", 4);
  const auto out = play_question(q, team("a", {"q"}), team("b", {"q"}));
  EXPECT_EQ(out.points_a, 0);
  EXPECT_EQ(out.points_b, 0);
  EXPECT_FALSE(out.winner.has_value());
  EXPECT_FALSE(out.buzz_position.has_value());
  EXPECT_TRUE(out.events.empty());
}

TEST(PlayQuestion, EarlyCorrectBuzzPreemptsOpponent) {
  const auto q = gen::question("q", 5);
  auto a = team("a", {"q"});
  auto b = team("b", {"q"});
  a.add("q", {0.4, 1, true});
  b.add("q", {0.6, 2, true});
  const auto out = play_question(q, a, b);
  EXPECT_EQ(out.points_a, 10);
  EXPECT_EQ(out.points_b, 0);
  ASSERT_EQ(out.events.size(), 1u);
  EXPECT_EQ(out.events[0].team_id, "a");
}

TEST(PlayQuestion, TieRules) {
  const auto q = gen::question("q", 5);
  auto a = team("zulu", {"q"});
  auto b = team("alpha", {"q"});
  a.add("q", {0.4, 1, true});
  b.add("q", {0.4, 1, true});
  EXPECT_EQ(play_question(q, a, b).winner, "alpha");
  EXPECT_EQ(play_question(q, a, b, TieRule::alternating, 0).winner, "alpha");
  EXPECT_EQ(play_question(q, a, b, TieRule::alternating, 1).winner, "zulu");
}

TEST(PlayQuestion, ForeignQuestion) {
  const auto q = gen::question("q", 3);
  try {
    play_question(q, team("a", {"q"}), team("b", {"other"}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ForeignQuestion);
  }
}

TEST(PlayQuestion, AwardsAreAlwaysLegal) {
  gen::Rng rng(71);
  const auto q = gen::question("q", 6);
  for (int i = 0; i < 2000; ++i) {
    auto a = team("a", {"q"});
    auto b = team("b", {"q"});
    for (auto* tt : {&a, &b}) {
      const int k = gen::uniform_int(rng, 0, 2);
      for (int j = 0; j < k; ++j) {
        const int clue = gen::uniform_int(rng, 0, 5);
        tt->add("q", {(clue + 1) / 6.0 - 0.01 * j, clue, gen::unit(rng) < 0.5});
      }
    }
    const auto out = play_question(q, a, b, i % 2 ? TieRule::alternating : TieRule::lower_team_id, i);
    for (int p : {out.points_a, out.points_b}) EXPECT_TRUE(p == 10 || p == -5 || p == 0) << p;
    EXPECT_FALSE(out.points_a == 10 && out.points_b == 10);
    EXPECT_EQ(out.winner.has_value(), out.points_a == 10 || out.points_b == 10);
  }
}

TEST(PlayMatch, SweepAndSetSize) {
  auto set = numbered_set(20, 0);
  auto a = team("a", qids_of(set));
  auto b = team("b", qids_of(set));
  for (const auto& q : set.main) {
    a.add(q.qid, {0.5, 1, true});
    b.add(q.qid, {0.25, 0, false});
  }
  const auto r = play_match("sweep", set, a, b);
  EXPECT_EQ(r.total_a, 200);
  EXPECT_EQ(r.total_b, -100);
  EXPECT_EQ(r.winner, "a");
  EXPECT_FALSE(r.tiebreaker_used);

  for (auto [m, t] : {std::pair{19, 0}, std::pair{21, 0}, std::pair{20, 4}}) {
    try {
      play_match("bad", numbered_set(m, t), a, b);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::WrongSetSize);
    }
  }
}

TEST(PlayMatch, TiebreakerDecides) {
  auto set = numbered_set(20, 3);
  auto a = team("a", qids_of(set));
  auto b = team("b", qids_of(set));
  for (int i = 0; i < 10; ++i) {
    a.add(set.main[static_cast<std::size_t>(i)].qid, {0.5, 1, true});
    b.add(set.main[static_cast<std::size_t>(10 + i)].qid, {0.5, 1, true});
  }
  a.add("t0", {0.75, 2, true});
  b.add("t1", {0.25, 0, true});  // never reached
  const auto r = play_match("tb", set, a, b);
  EXPECT_EQ(r.total_a, 110);
  EXPECT_EQ(r.total_b, 100);
  EXPECT_TRUE(r.tiebreaker_used);
  EXPECT_EQ(r.winner, "a");
  EXPECT_EQ(r.questions.size(), 21u);
}

TEST(PlayMatch, AllTiebreakersTieIsDraw) {
  auto set = numbered_set(20, 3);
  const auto r = play_match("draw", set, team("a", qids_of(set)), team("b", qids_of(set)));
  EXPECT_EQ(r.total_a, 0);
  EXPECT_EQ(r.total_b, 0);
  EXPECT_TRUE(r.tiebreaker_used);
  EXPECT_FALSE(r.winner.has_value());
  EXPECT_EQ(r.questions.size(), 23u);
}

TEST(PlayMatch, ScriptedMatchHandTotals) {
  const auto s = load_scripted();
  const auto alpha = human_team("alpha", "final", s.buzzes, s.questions);
  const auto bravo = human_team("bravo", "final", s.buzzes, s.questions);
  const auto r = play_match("final", s.set, alpha, bravo);

  // Per main question (alpha, bravo), traced by hand from the buzz script.
  const std::vector<std::pair<int, int>> expect{
      {10, 0}, {0, 10}, {-5, 10}, {0, 0},  {10, 0}, {0, -5}, {10, 0},
      {0, 10}, {-5, -5}, {10, 0}, {0, 10}, {10, -5}, {10, 0}, {0, 10},
      {0, 0},  {0, 10}, {10, 0}, {0, 10}, {-5, 0}, {0, 0}};
  ASSERT_EQ(r.questions.size(), 22u);  // second tiebreaker decides; third unplayed
  int a = 0, b = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(r.questions[i].points_a, expect[i].first) << r.questions[i].qid;
    EXPECT_EQ(r.questions[i].points_b, expect[i].second) << r.questions[i].qid;
    a += expect[i].first;
    b += expect[i].second;
  }
  EXPECT_EQ(a, 55);
  EXPECT_EQ(b, 55);
  EXPECT_FALSE(r.questions[20].winner.has_value());
  EXPECT_EQ(r.questions[21].winner, "bravo");
  EXPECT_EQ(r.total_a, 55);
  EXPECT_EQ(r.total_b, 65);
  EXPECT_TRUE(r.tiebreaker_used);
  EXPECT_EQ(r.winner, "bravo");

  int sum_a = 0, sum_b = 0;
  for (const auto& q : r.questions) {
    sum_a += q.points_a;
    sum_b += q.points_b;
  }
  EXPECT_EQ(sum_a, r.total_a);
  EXPECT_EQ(sum_b, r.total_b);

  const auto again = play_match("final", s.set, alpha, bravo);
  EXPECT_EQ(to_json(again).dump(), to_json(r).dump());
}

TEST(Standings, Examples) {
  EXPECT_TRUE(standings({}).empty());

  MatchResult one{"m", "x", "y", {}, 30, 40, false, "y"};
  const std::vector<MatchResult> single{one};
  const auto s1 = standings(single);
  ASSERT_EQ(s1.size(), 2u);
  EXPECT_EQ(s1[0].team_id, "y");

  // Round robin: a beats b 50-20, b beats c 30-25, a and c draw 40-40.
  const std::vector<MatchResult> rr{{"1", "a", "b", {}, 50, 20, false, "a"},
                                    {"2", "b", "c", {}, 30, 25, false, "b"},
                                    {"3", "a", "c", {}, 40, 40, true, std::nullopt}};
  const auto table = standings(rr);
  ASSERT_EQ(table.size(), 3u);
  EXPECT_EQ(table[0].team_id, "a");
  EXPECT_EQ(table[0].wins, 1);
  EXPECT_EQ(table[0].draws, 1);
  EXPECT_EQ(table[0].points_for, 90);
  EXPECT_EQ(table[0].points_against, 60);
  EXPECT_EQ(table[1].team_id, "b");
  EXPECT_EQ(table[1].wins, 1);
  EXPECT_EQ(table[1].losses, 1);
  EXPECT_EQ(table[1].differential(), -25);
  EXPECT_EQ(table[2].team_id, "c");
  EXPECT_EQ(table[2].draws, 1);
  EXPECT_EQ(table[2].differential(), -5);
  EXPECT_EQ(table[2].played, 2);
}

TEST(Replay, ModelTeamUsesBuzzpointPositions) {
  gen::Rng rng(72);
  std::vector<Question> qs;
  std::vector<Buzzpoint> bps;
  for (int i = 0; i < 30; ++i) {
    Question q = gen::question("q" + std::to_string(i), gen::uniform_int(rng, 1, 6));
    GuessTrace tr{q.qid, "gpt-sim", {}, nlohmann::json::object()};
    for (int t = 0; t < static_cast<int>(q.clues.size()); ++t) {
      GuessStep st;
      st.t = t;
      st.logprob_sum = -gen::unit(rng) * 0.1;
      st.correct = gen::unit(rng) < 0.5 ? Correctness::correct : Correctness::incorrect;
      tr.steps.push_back(st);
    }
    bps.push_back(find_buzzpoint(tr, {"gpt-sim", -0.03}));
    qs.push_back(q);
  }
  const auto mt = model_team("gpt-sim", bps, qs);
  EXPECT_EQ(mt.kind, TeamKind::model);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto& attempts = mt.attempts.at(qs[i].qid);
    if (!bps[i].t) {
      EXPECT_TRUE(attempts.empty());
      continue;
    }
    ASSERT_EQ(attempts.size(), 1u);
    EXPECT_EQ(attempts[0].clue_index, *bps[i].t);
    EXPECT_EQ(attempts[0].position, clue_word_spans(qs[i])[static_cast<std::size_t>(*bps[i].t)].second);
    const auto out = play_question(qs[i], mt, team("zz", {qs[i].qid}));
    ASSERT_EQ(out.events.size(), 1u);
    EXPECT_EQ(out.events[0].clue_index, *bps[i].t);
  }
}
