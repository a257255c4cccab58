#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace buzzcal {

// Pulls a stated probability out of free-form model output. Looks for a
// "Probability:" field first (percent-style values in (1,100] are divided by
// 100), then for the last bare decimal in [0,1]. Never returns a value
// outside [0,1].
std::optional<double> extract_verbalized_confidence(std::string_view raw_output);

struct LogitConfidence {
  double logit_conf;   // mean of exp(logprob) over tokens
  double logprob_sum;  // sum of logprobs
};

LogitConfidence aggregate_logit_confidence(std::span<const double> token_logprobs);

}  // namespace buzzcal
