#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "buzzcal/types.hpp"

namespace buzzcal {

// How answers that would be "prompted" in live play are scored.
enum class PromptPolicy { incorrect, correct };

std::optional<PromptPolicy> parse_prompt_policy(std::string_view s);
std::string_view to_string(PromptPolicy p);

// lowercase -> NFKD with combining marks removed -> punctuation removed ->
// leading article dropped -> whitespace collapsed.
std::string normalize_answer(std::string_view text);

// Manual judgments keyed by (qid, normalized guess). Checked before any rule.
class OverrideTable {
 public:
  void set(std::string_view qid, std::string_view guess, bool correct);
  std::optional<bool> lookup(std::string_view qid, std::string_view guess) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, bool> table_;
};

Correctness match_answer(std::string_view guess, const AnswerSpec& spec, PromptPolicy policy);

Correctness match_answer(std::string_view guess, const Question& question, PromptPolicy policy,
                         const OverrideTable& overrides);

}  // namespace buzzcal
