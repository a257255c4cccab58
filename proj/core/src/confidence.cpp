#include "buzzcal/confidence.hpp"

#include <cmath>
#include <regex>
#include <string>

#include "buzzcal/error.hpp"

namespace buzzcal {

std::optional<double> extract_verbalized_confidence(std::string_view raw_output) {
  const std::string text(raw_output);

  static const std::regex field(R"(probability\s*[:=]\s*(\d+(?:\.\d*)?|\.\d+)\s*(%?))",
                                std::regex::icase);
  std::smatch m;
  if (std::regex_search(text, m, field)) {
    const double v = std::stod(m[1].str());
    const bool percent = m[2].matched && m[2].length() > 0;
    if (percent) {
      if (v >= 0.0 && v <= 100.0) return v / 100.0;
    } else if (v >= 0.0 && v <= 1.0) {
      return v;
    } else if (v > 1.0 && v <= 100.0) {
      return v / 100.0;
    }
  }

  // Fallback: the last standalone decimal that already lies in [0, 1].
  static const std::regex number(R"((^|[^\d.])(\d+(?:\.\d+)?|\.\d+)(?!\d|\.\d))");
  std::optional<double> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number);
       it != std::sregex_iterator(); ++it) {
    const double v = std::stod((*it)[2].str());
    if (v >= 0.0 && v <= 1.0) last = v;
  }
  return last;
}

LogitConfidence aggregate_logit_confidence(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) {
    throw Error(ErrorKind::EmptyTokenList, "no token log-probabilities");
  }
  double sum = 0.0;
  double prob_sum = 0.0;
  for (double lp : token_logprobs) {
    if (!(lp <= 0.0)) {
      throw Error(ErrorKind::Domain, "token log-probability must be <= 0, got " + std::to_string(lp));
    }
    sum += lp;
    prob_sum += std::exp(lp);
  }
  return {prob_sum / static_cast<double>(token_logprobs.size()), sum};
}

}  // namespace buzzcal
