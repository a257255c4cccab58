#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "buzzcal/metrics.hpp"
#include "buzzcal/types.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Confidence with extra mass on the endpoints, which are the usual edge cases.
inline double confidence(Rng& rng) {
  const double roll = unit(rng);
  if (roll < 0.05) return 0.0;
  if (roll < 0.10) return 1.0;
  return unit(rng);
}

inline buzzcal::CalScoreInput calscore_input(Rng& rng, int max_clues = 10) {
  const int n = uniform_int(rng, 1, max_clues);
  buzzcal::CalScoreInput in;
  for (int t = 0; t < n; ++t) {
    in.g.push_back(unit(rng) < 0.5 ? 1 : -1);
    in.c.push_back(confidence(rng));
    in.h.push_back(unit(rng));
  }
  return in;
}

// Non-negative increments summing to at most 1.
inline std::vector<double> incremental_mass(Rng& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : w) {
    x = unit(rng);
    total += x;
  }
  const double scale = unit(rng) / std::max(total, 1e-12);
  for (auto& x : w) x *= scale;
  return w;
}

inline std::vector<int> binary(const std::vector<int>& signed_g) {
  std::vector<int> out;
  for (int g : signed_g) out.push_back(g > 0 ? 1 : 0);
  return out;
}

inline buzzcal::Question question(const std::string& qid, int n_clues) {
  buzzcal::Question q;
  q.qid = qid;
  q.category = buzzcal::Category::science;
  for (int t = 0; t < n_clues; ++t) q.clues.push_back("clue " + std::to_string(t));
  q.answer.canonical = "answer";
  return q;
}

inline std::vector<buzzcal::BuzzRecord> buzz_log(Rng& rng, const std::string& qid, int n_clues,
                                                 int max_buzzes = 12) {
  std::vector<buzzcal::BuzzRecord> out;
  const int count = uniform_int(rng, 0, max_buzzes);
  for (int i = 0; i < count; ++i) {
    buzzcal::BuzzRecord b;
    b.qid = qid;
    b.team_id = "team" + std::to_string(i);
    b.match_id = "m" + std::to_string(i / 2);
    b.t = uniform_int(rng, 0, n_clues - 1);
    b.position_frac = static_cast<double>(b.t + 1) / n_clues;
    b.correct = unit(rng) < 0.5;
    out.push_back(b);
  }
  return out;
}

}  // namespace gen
