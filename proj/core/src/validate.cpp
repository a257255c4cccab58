#include "buzzcal/validate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

namespace buzzcal {
namespace {

constexpr double kPositionTolerance = 1e-9;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
}

std::string loc(const std::string& qid) { return "qid=" + qid; }

std::string loc(const std::string& qid, const std::string& who, int t) {
  return "qid=" + qid + " " + who + " t=" + std::to_string(t);
}

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DuplicateQid: return "duplicate_qid";
    case ViolationKind::EmptyClues: return "empty_clues";
    case ViolationKind::EmptyClue: return "empty_clue";
    case ViolationKind::BadAnswerSpec: return "bad_answer_spec";
    case ViolationKind::UnknownQid: return "unknown_qid";
    case ViolationKind::DuplicateTrace: return "duplicate_trace";
    case ViolationKind::StepIndexOutOfRange: return "step_index_out_of_range";
    case ViolationKind::DuplicateStep: return "duplicate_step";
    case ViolationKind::MissingStep: return "missing_step";
    case ViolationKind::NoConfidenceChannel: return "no_confidence_channel";
    case ViolationKind::ConfidenceOutOfRange: return "confidence_out_of_range";
    case ViolationKind::PositiveLogprob: return "positive_logprob";
    case ViolationKind::ClueIndexOutOfRange: return "clue_index_out_of_range";
    case ViolationKind::PositionOutOfRange: return "position_out_of_range";
    case ViolationKind::PositionClueMismatch: return "position_clue_mismatch";
    case ViolationKind::DuplicateSurveyResponse: return "duplicate_survey_response";
  }
  return "unknown";
}

ValidationReport validate_dataset(std::span<const Question> questions,
                                  std::span<const GuessTrace> traces,
                                  std::span<const BuzzRecord> buzzes,
                                  std::span<const SurveyResponse> surveys) {
  std::vector<Violation> out;
  auto add = [&out](ViolationKind k, std::string where, std::string msg) {
    out.push_back({k, std::move(where), std::move(msg)});
  };

  std::map<std::string, const Question*> by_qid;
  std::set<std::string> duplicated;
  for (const auto& q : questions) {
    auto [it, inserted] = by_qid.emplace(q.qid, &q);
    if (!inserted) {
      add(ViolationKind::DuplicateQid, loc(q.qid), "qid appears more than once");
      duplicated.insert(q.qid);
    }
    if (q.clues.empty()) add(ViolationKind::EmptyClues, loc(q.qid), "question has no clues");
    for (std::size_t i = 0; i < q.clues.size(); ++i) {
      if (blank(q.clues[i])) {
        add(ViolationKind::EmptyClue, loc(q.qid) + " clue=" + std::to_string(i), "clue is empty");
      }
    }
    if (blank(q.answer.canonical)) {
      add(ViolationKind::BadAnswerSpec, loc(q.qid), "canonical answer is empty");
    } else if (q.answer.prompt_aliases.contains(q.answer.canonical)) {
      add(ViolationKind::BadAnswerSpec, loc(q.qid), "canonical answer listed as a prompt alias");
    }
  }
  // Records that point at an ambiguous qid are covered by the duplicate report.
  for (const auto& qid : duplicated) by_qid.erase(qid);

  auto clue_count = [&](const std::string& qid) -> std::optional<int> {
    auto it = by_qid.find(qid);
    if (it == by_qid.end()) return std::nullopt;
    return static_cast<int>(it->second->clues.size());
  };

  std::set<std::pair<std::string, std::string>> seen_traces;
  for (const auto& tr : traces) {
    const std::string who = "model=" + tr.model_id;
    if (duplicated.contains(tr.qid)) continue;
    const auto n = clue_count(tr.qid);
    if (!n) {
      add(ViolationKind::UnknownQid, loc(tr.qid) + " " + who, "trace references unknown question");
      continue;
    }
    if (!seen_traces.emplace(tr.qid, tr.model_id).second) {
      add(ViolationKind::DuplicateTrace, loc(tr.qid) + " " + who, "more than one trace for pair");
    }
    std::vector<int> hits(static_cast<std::size_t>(*n), 0);
    for (const auto& s : tr.steps) {
      const std::string where = loc(tr.qid, who, s.t);
      if (s.t < 0 || s.t >= *n) {
        add(ViolationKind::StepIndexOutOfRange, where,
            "step index outside [0, " + std::to_string(*n) + ")");
      } else if (++hits[static_cast<std::size_t>(s.t)] == 2) {
        add(ViolationKind::DuplicateStep, where, "clue index repeated");
      }
      if (!s.logit_conf && !s.verbalized_conf && !s.logprob_sum && !s.raw_output) {
        add(ViolationKind::NoConfidenceChannel, where, "no confidence channel present");
      }
      if (s.logit_conf && !in_unit(*s.logit_conf)) {
        add(ViolationKind::ConfidenceOutOfRange, where, "logit_conf out of [0,1]");
      }
      if (s.verbalized_conf && !in_unit(*s.verbalized_conf)) {
        add(ViolationKind::ConfidenceOutOfRange, where, "verbalized_conf out of [0,1]");
      }
      if (s.logprob_sum && !(std::isfinite(*s.logprob_sum) && *s.logprob_sum <= 0.0)) {
        add(ViolationKind::PositiveLogprob, where, "logprob_sum must be <= 0");
      }
    }
    for (int t = 0; t < *n; ++t) {
      if (hits[static_cast<std::size_t>(t)] == 0) {
        add(ViolationKind::MissingStep, loc(tr.qid, who, t), "missing step t=" + std::to_string(t));
      }
    }
  }

  for (const auto& b : buzzes) {
    const std::string where = loc(b.qid, "team=" + b.team_id + " match=" + b.match_id, b.t);
    if (duplicated.contains(b.qid)) continue;
    auto it = by_qid.find(b.qid);
    if (it == by_qid.end()) {
      add(ViolationKind::UnknownQid, where, "buzz references unknown question");
      continue;
    }
    const int n = static_cast<int>(it->second->clues.size());
    if (b.t < 0 || b.t >= n) {
      add(ViolationKind::ClueIndexOutOfRange, where, "clue index outside question");
      continue;
    }
    if (!(std::isfinite(b.position_frac) && b.position_frac > 0.0 && b.position_frac <= 1.0)) {
      add(ViolationKind::PositionOutOfRange, where, "position_frac outside (0,1]");
      continue;
    }
    const auto spans = clue_word_spans(*it->second);
    const auto [lo, hi] = spans[static_cast<std::size_t>(b.t)];
    if (b.position_frac <= lo - kPositionTolerance || b.position_frac > hi + kPositionTolerance) {
      add(ViolationKind::PositionClueMismatch, where,
          "position_frac outside the word span of clue t");
    }
  }

  std::set<std::tuple<std::string, std::string, int>> seen_responses;
  for (const auto& s : surveys) {
    const std::string where = loc(s.qid, "player=" + s.player_id, s.t);
    if (duplicated.contains(s.qid)) continue;
    const auto n = clue_count(s.qid);
    if (!n) {
      add(ViolationKind::UnknownQid, where, "survey response references unknown question");
      continue;
    }
    if (s.t < 0 || s.t >= *n) {
      add(ViolationKind::ClueIndexOutOfRange, where, "clue index outside question");
      continue;
    }
    if (!seen_responses.emplace(s.player_id, s.qid, s.t).second) {
      add(ViolationKind::DuplicateSurveyResponse, where, "more than one response");
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return {std::move(out)};
}

}  // namespace buzzcal
