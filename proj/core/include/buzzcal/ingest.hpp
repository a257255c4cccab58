#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "buzzcal/answer_match.hpp"
#include "buzzcal/types.hpp"
#include "buzzcal/validate.hpp"

namespace buzzcal {

// Readers accept one JSON object per line; blank lines are skipped.
// Errors carry the 1-based line number in the message.
std::vector<Question> parse_questions(const std::filesystem::path& path);
std::vector<GuessTrace> parse_traces(const std::filesystem::path& path);
std::vector<BuzzRecord> parse_buzzes(const std::filesystem::path& path);
std::vector<SurveyResponse> parse_surveys(const std::filesystem::path& path);
OverrideTable parse_overrides(const std::filesystem::path& path);

std::vector<Question> parse_questions(std::istream& in);
std::vector<GuessTrace> parse_traces(std::istream& in);
std::vector<BuzzRecord> parse_buzzes(std::istream& in);
std::vector<SurveyResponse> parse_surveys(std::istream& in);
OverrideTable parse_overrides(std::istream& in);

nlohmann::json to_json(const Question& q);
nlohmann::json to_json(const GuessTrace& t);
nlohmann::json to_json(const BuzzRecord& b);
nlohmann::json to_json(const SurveyResponse& s);

template <typename Record>
void write_jsonl(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

struct BundleConfig {
  PromptPolicy prompt_policy = PromptPolicy::incorrect;
};

struct DatasetBundle {
  std::vector<Question> questions;
  std::vector<GuessTrace> traces;
  std::vector<BuzzRecord> buzzes;
  std::vector<SurveyResponse> surveys;
  OverrideTable overrides;
  BundleConfig config;

  const Question* find_question(std::string_view qid) const;
  ValidationReport validate() const;
};

// Fills unresolved correctness by alias matching; overrides win over both the
// matcher and correctness already present in the trace. Returns the number of
// steps whose correctness changed.
int resolve_correctness(DatasetBundle& bundle);

// Fills verbalized_conf from raw_output where it is absent and extraction
// succeeds. Returns the number of steps filled.
int extract_missing_verbalized(DatasetBundle& bundle);

}  // namespace buzzcal
