#pragma once

#include <span>
#include <string>
#include <vector>

#include "buzzcal/types.hpp"

namespace buzzcal {

enum class ViolationKind {
  DuplicateQid,
  EmptyClues,
  EmptyClue,
  BadAnswerSpec,
  UnknownQid,
  DuplicateTrace,
  StepIndexOutOfRange,
  DuplicateStep,
  MissingStep,
  NoConfidenceChannel,
  ConfidenceOutOfRange,
  PositiveLogprob,
  ClueIndexOutOfRange,
  PositionOutOfRange,
  PositionClueMismatch,
  DuplicateSurveyResponse,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string where;  // "qid=q1 model=m t=2" style locator
  std::string message;

  auto operator<=>(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;  // sorted, so record order never matters

  bool ok() const { return violations.empty(); }
};

// Reports every problem found; never throws.
ValidationReport validate_dataset(std::span<const Question> questions,
                                  std::span<const GuessTrace> traces,
                                  std::span<const BuzzRecord> buzzes,
                                  std::span<const SurveyResponse> surveys = {});

}  // namespace buzzcal
