#include "buzzcal/types.hpp"

#include <sstream>

#include "buzzcal/error.hpp"

namespace buzzcal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::DuplicateQid: return "DuplicateQid";
    case ErrorKind::EmptyClue: return "EmptyClue";
    case ErrorKind::EmptyTokenList: return "EmptyTokenList";
    case ErrorKind::ForeignBuzz: return "ForeignBuzz";
    case ErrorKind::ZeroMatches: return "ZeroMatches";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::MissingChannel: return "MissingChannel";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::UnresolvedCorrectness: return "UnresolvedCorrectness";
    case ErrorKind::ForeignQuestion: return "ForeignQuestion";
    case ErrorKind::WrongSetSize: return "WrongSetSize";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::literature: return "literature";
    case Category::history: return "history";
    case Category::science: return "science";
    case Category::arts: return "arts";
    case Category::social_science: return "social_science";
    case Category::geo_ce: return "geo_ce";
    case Category::other: return "other";
  }
  return "other";
}

std::optional<Category> parse_category(std::string_view s) {
  for (Category c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Correctness c) {
  switch (c) {
    case Correctness::incorrect: return "false";
    case Correctness::correct: return "true";
    case Correctness::unresolved: return "unresolved";
  }
  return "unresolved";
}

std::string_view to_string(Channel c) { return c == Channel::logit ? "logit" : "verbalized"; }

std::optional<Channel> parse_channel(std::string_view s) {
  if (s == "logit") return Channel::logit;
  if (s == "verbalized") return Channel::verbalized;
  return std::nullopt;
}

Outcome Outcome::from(Correctness c) {
  if (c == Correctness::unresolved) {
    throw Error(ErrorKind::UnresolvedCorrectness, "correctness must be resolved before scoring");
  }
  return Outcome(c == Correctness::correct);
}

std::vector<std::pair<double, double>> clue_word_spans(const Question& q) {
  std::vector<std::size_t> words;
  words.reserve(q.clues.size());
  std::size_t total = 0;
  for (const auto& clue : q.clues) {
    std::istringstream in(clue);
    std::size_t n = 0;
    for (std::string w; in >> w;) ++n;
    words.push_back(n);
    total += n;
  }
  std::vector<std::pair<double, double>> spans;
  spans.reserve(words.size());
  if (total == 0) {
    // Degenerate: fall back to equal clue widths.
    const double n = static_cast<double>(q.clues.size());
    for (std::size_t i = 0; i < q.clues.size(); ++i) spans.emplace_back(i / n, (i + 1) / n);
    return spans;
  }
  std::size_t seen = 0;
  for (std::size_t w : words) {
    const double lo = static_cast<double>(seen) / static_cast<double>(total);
    seen += w;
    spans.emplace_back(lo, static_cast<double>(seen) / static_cast<double>(total));
  }
  return spans;
}

}  // namespace buzzcal
