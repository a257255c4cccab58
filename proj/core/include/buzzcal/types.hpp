#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace buzzcal {

// Top-level question categories.
enum class Category { literature, history, science, arts, social_science, geo_ce, other };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);
inline constexpr Category kAllCategories[] = {Category::literature, Category::history,
                                              Category::science,    Category::arts,
                                              Category::social_science, Category::geo_ce,
                                              Category::other};

// Ternary correctness of a guess before/after answer resolution.
enum class Correctness { incorrect, correct, unresolved };

std::string_view to_string(Correctness c);

struct AnswerSpec {
  std::string canonical;
  std::set<std::string> accept_aliases;
  std::set<std::string> prompt_aliases;

  bool operator==(const AnswerSpec&) const = default;
};

struct Question {
  std::string qid;
  Category category = Category::other;
  std::vector<std::string> clues;
  AnswerSpec answer;
  // Fields we do not interpret; kept so a parse/write cycle is lossless.
  nlohmann::json extra = nlohmann::json::object();

  std::size_t num_clues() const { return clues.size(); }
  bool operator==(const Question&) const = default;
};

// Word span of each clue as a fraction of all words in the question:
// clue t covers (bounds[t].first, bounds[t].second].
std::vector<std::pair<double, double>> clue_word_spans(const Question& q);

struct GuessStep {
  int t = 0;
  std::string guess;
  Correctness correct = Correctness::unresolved;
  std::optional<double> logit_conf;
  std::optional<double> verbalized_conf;
  std::optional<double> logprob_sum;
  std::optional<std::string> raw_output;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const GuessStep&) const = default;
};

struct GuessTrace {
  std::string qid;
  std::string model_id;
  std::vector<GuessStep> steps;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const GuessTrace&) const = default;
};

enum class TeamKind { human, model };

struct BuzzRecord {
  std::string qid;
  std::string team_id;
  std::string match_id;
  int t = 0;
  double position_frac = 1.0;
  bool correct = false;
  // Absent in most logs; defaults to human.
  TeamKind team_kind = TeamKind::human;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const BuzzRecord&) const = default;
};

struct SurveyResponse {
  std::string player_id;
  std::string qid;
  int t = 0;
  std::string guess;
  bool correct = false;
  bool would_buzz = false;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const SurveyResponse&) const = default;
};

struct HumanCurve {
  std::string qid;
  std::vector<double> h;
  std::vector<int> support;
};

// Correctness with its two numeric views: signed (+1/-1) for the CalScore
// family and binary (1/0) for ECE and Brier.
class Outcome {
 public:
  explicit constexpr Outcome(bool correct) : correct_(correct) {}
  static Outcome from(Correctness c);

  constexpr bool correct() const { return correct_; }
  constexpr int signed_value() const { return correct_ ? 1 : -1; }
  constexpr int binary() const { return correct_ ? 1 : 0; }

 private:
  bool correct_;
};

enum class Channel { logit, verbalized };

std::string_view to_string(Channel c);
std::optional<Channel> parse_channel(std::string_view s);

struct QuestionMetrics {
  double calscore = 0.0;
  double mce = 0.0;
  double sh_q = 0.0;
  int n_clues = 0;
};

struct AggregateMetrics {
  double calscore_D = 0.0;
  double mce_D = 0.0;
  double ece = 0.0;
  double brier = 0.0;
  double sh_q_mean = 0.0;
  int questions = 0;
  int steps = 0;
};

struct MetricReport {
  std::string model_id;
  Channel confidence_channel = Channel::logit;
  std::map<std::string, QuestionMetrics> per_question;
  AggregateMetrics aggregate;
  std::map<Category, AggregateMetrics> per_category;
  // Steps excluded because the channel value could not be recovered.
  int skipped_steps = 0;
};

}  // namespace buzzcal
