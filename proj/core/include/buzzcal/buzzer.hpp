#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "buzzcal/types.hpp"

namespace buzzcal {

// Which GuessStep field a threshold is compared against.
enum class ThresholdChannel { logprob_sum, logit_conf, verbalized_conf };

std::optional<ThresholdChannel> parse_threshold_channel(std::string_view s);
std::string_view to_string(ThresholdChannel c);
std::optional<double> channel_value(const GuessStep& step, ThresholdChannel channel);

struct BuzzThreshold {
  std::string model_key;  // model id or family name
  double value = 0.0;
  ThresholdChannel channel = ThresholdChannel::logprob_sum;
};

inline constexpr double kGptThreshold = -0.03;
inline constexpr double kMistralThreshold = -0.05;

// Family defaults: ids containing "gpt" use -0.03, "mistral" -0.05
// (case-insensitive).
std::optional<BuzzThreshold> default_threshold(std::string_view model_id);

// Explicit per-model thresholds with family defaults as the fallback.
class ThresholdTable {
 public:
  void set(std::string model_id, double value);
  std::optional<BuzzThreshold> lookup(std::string_view model_id) const;
  const std::map<std::string, double, std::less<>>& explicit_values() const { return values_; }
  ThresholdChannel channel = ThresholdChannel::logprob_sum;

  // "model=value,model=value"
  static ThresholdTable parse(std::string_view spec);

 private:
  std::map<std::string, double, std::less<>> values_;
};

struct Buzzpoint {
  std::string qid;
  std::string model_id;
  std::optional<int> t;  // none: never buzzed
  std::string guess;
  Correctness correct = Correctness::unresolved;
};

nlohmann::json to_json(const Buzzpoint& bp);

// First step whose confidence strictly exceeds the threshold.
Buzzpoint find_buzzpoint(const GuessTrace& trace, const BuzzThreshold& threshold);

struct PolynomialCurve {
  double a1 = 0.0775;
  double a2 = -1.278;
  double a3 = 0.588;
};

// Step function: value of the last knot at or before t, zero before the first.
struct EmpiricalCurve {
  std::vector<double> positions;  // strictly increasing in (0, 1]
  std::vector<double> values;
};

// What a curve's values mean.
enum class CurveOrientation { answered_by, not_answered_by };

struct HumanAccuracyCurve {
  std::variant<PolynomialCurve, EmpiricalCurve> form = PolynomialCurve{};
  CurveOrientation orientation = CurveOrientation::answered_by;
};

double eval_pi_raw(const HumanAccuracyCurve& curve, double t);
// Raw value clamped to [0, 1]. Throws Domain for t outside [0, 1].
double eval_pi(const HumanAccuracyCurve& curve, double t);
// Probability that the average player has answered correctly by t.
double answered_by(const HumanAccuracyCurve& curve, double t);
double not_answered_by(const HumanAccuracyCurve& curve, double t);

// Knots at (t + 1) / N carrying h_t.
HumanAccuracyCurve empirical_from_human_curve(const HumanCurve& curve);
// Share of buzz records answered correctly at or before each grid position.
HumanAccuracyCurve empirical_from_buzzes(std::span<const BuzzRecord> buzzes, double grid_step);

// Fraction of the question revealed when buzzing after clue t.
inline double buzz_fraction(int t, int n) { return static_cast<double>(t + 1) / n; }

struct ThresholdPayoff {
  double theta = 0.0;
  double payoff = 0.0;
  int buzzes = 0;
  int correct_buzzes = 0;
};

struct ThresholdFit {
  double best_theta = 0.0;
  double best_payoff = 0.0;
  std::vector<ThresholdPayoff> table;  // grid order
};

// payoff(theta) = mean over traces of correct * (1 - A(pos)) - incorrect * penalty,
// zero for traces that never buzz. Ties pick the smaller theta.
ThresholdFit fit_threshold(std::span<const GuessTrace> traces, const HumanAccuracyCurve& curve,
                           std::span<const double> grid, double penalty,
                           ThresholdChannel channel = ThresholdChannel::logprob_sum);

// Inclusive arithmetic grid from..to in `step` increments.
std::vector<double> threshold_grid(double from, double to, double step);

}  // namespace buzzcal
