#include "buzzcal/answer_match.hpp"

#include <sstream>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace buzzcal {
namespace {

bool is_apostrophe(UChar32 ch) { return ch == 0x27 || ch == 0x2019 || ch == 0x2018 || ch == 0x60; }

// NFKD, then drop combining marks.
icu::UnicodeString fold(std::string_view text) {
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkd = icu::Normalizer2::getNFKDInstance(status);
  icu::UnicodeString decomposed;
  if (U_SUCCESS(status)) {
    decomposed = nfkd->normalize(source, status);
  }
  if (U_FAILURE(status)) decomposed = source;
  return decomposed;
}

}  // namespace

std::optional<PromptPolicy> parse_prompt_policy(std::string_view s) {
  if (s == "incorrect") return PromptPolicy::incorrect;
  if (s == "correct") return PromptPolicy::correct;
  return std::nullopt;
}

std::string_view to_string(PromptPolicy p) {
  return p == PromptPolicy::correct ? "correct" : "incorrect";
}

std::string normalize_answer(std::string_view text) {
  const icu::UnicodeString decomposed = fold(text);
  icu::UnicodeString cleaned;
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 ch = decomposed.char32At(i);
    i += U16_LENGTH(ch);
    if (u_charType(ch) == U_NON_SPACING_MARK || u_charType(ch) == U_ENCLOSING_MARK) continue;
    if (is_apostrophe(ch)) continue;
    if (u_ispunct(ch) || u_isspace(ch) || u_charType(ch) == U_MATH_SYMBOL) {
      cleaned.append(static_cast<UChar32>(' '));
      continue;
    }
    cleaned.append(u_tolower(ch));
  }
  std::string utf8;
  cleaned.toUTF8String(utf8);

  std::istringstream in(utf8);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(std::move(w));
  if (words.size() > 1 && (words[0] == "the" || words[0] == "a" || words[0] == "an")) {
    words.erase(words.begin());
  }
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

void OverrideTable::set(std::string_view qid, std::string_view guess, bool correct) {
  table_[{std::string(qid), normalize_answer(guess)}] = correct;
}

std::optional<bool> OverrideTable::lookup(std::string_view qid, std::string_view guess) const {
  auto it = table_.find({std::string(qid), normalize_answer(guess)});
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

Correctness match_answer(std::string_view guess, const AnswerSpec& spec, PromptPolicy policy) {
  const std::string g = normalize_answer(guess);
  // An empty answer is a non-answer.
  if (g.empty()) return Correctness::incorrect;
  if (g == normalize_answer(spec.canonical)) return Correctness::correct;
  for (const auto& alias : spec.accept_aliases) {
    if (g == normalize_answer(alias)) return Correctness::correct;
  }
  for (const auto& alias : spec.prompt_aliases) {
    if (g == normalize_answer(alias)) {
      return policy == PromptPolicy::correct ? Correctness::correct : Correctness::incorrect;
    }
  }
  return Correctness::incorrect;
}

Correctness match_answer(std::string_view guess, const Question& question, PromptPolicy policy,
                         const OverrideTable& overrides) {
  if (auto judged = overrides.lookup(question.qid, guess)) {
    return *judged ? Correctness::correct : Correctness::incorrect;
  }
  return match_answer(guess, question.answer, policy);
}

}  // namespace buzzcal
