#pragma once

// Deliberately naive reference implementations. They share no code with the
// library: long double accumulation, tanh-based sigmoid, interval membership
// for bins, and quadratic recomputation wherever the library uses prefixes.

#include <cmath>
#include <cstddef>
#include <vector>

#include "buzzcal/types.hpp"

namespace oracle {

inline long double sigmoid(long double x) { return 0.5L * (1.0L + std::tanh(x / 2.0L)); }

inline long double r(long double x) {
  return (sigmoid(x) - sigmoid(-1.0L)) / (sigmoid(1.0L) - sigmoid(-1.0L));
}

inline double mce(const std::vector<int>& g, const std::vector<double>& c) {
  long double total = 0.0L;
  for (std::size_t t = 0; t < g.size(); ++t) total += static_cast<long double>(g[t]) * c[t];
  return static_cast<double>(1.0L - r(total / static_cast<long double>(g.size())));
}

inline double calscore(const std::vector<int>& g, const std::vector<double>& c,
                       const std::vector<double>& h) {
  long double total = 0.0L;
  for (std::size_t t = 0; t < g.size(); ++t) {
    total += (1.0L - h[t]) * static_cast<long double>(g[t]) * c[t];
  }
  return static_cast<double>(1.0L - r(total / static_cast<long double>(g.size())));
}

// g is binary here.
inline double ece(const std::vector<int>& g, const std::vector<double>& c, int bins) {
  long double err = 0.0L;
  for (int m = 0; m < bins; ++m) {
    // Edges in double so a confidence written as 0.3 sits in [0.3, 0.4).
    const double lo = static_cast<double>(m) / bins;
    const double hi = static_cast<double>(m + 1) / bins;
    long double acc = 0.0L, conf = 0.0L;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double v = c[i];
      const bool inside = v >= lo && (v < hi || (m == bins - 1 && v <= hi));
      if (inside) {
        acc += g[i];
        conf += v;
      }
    }
    err += std::fabs(acc - conf);
  }
  return static_cast<double>(err / static_cast<long double>(c.size()));
}

inline double brier(const std::vector<int>& g, const std::vector<double>& c) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const long double d = static_cast<long double>(c[i]) - g[i];
    total += d * d;
  }
  return static_cast<double>(total / static_cast<long double>(c.size()));
}

inline long double buzz_mass(const std::vector<double>& c, std::size_t t) {
  long double mass = (t + 1 == c.size()) ? 1.0L : c[t];
  for (std::size_t i = 0; i < t; ++i) mass *= 1.0L - c[i];
  return mass;
}

// Quadratic: every prefix sum is recomputed from scratch.
inline double sh_q(const std::vector<double>& c, const std::vector<int>& g,
                   const std::vector<double>& h_inc) {
  const std::size_t n = c.size();
  long double s_q = 0.0L, k_total = 0.0L, h_total = 0.0L;
  for (std::size_t t = 0; t < n; ++t) {
    s_q += buzz_mass(c, t) * g[t];
    long double prefix = 0.0L;
    for (std::size_t e = 0; e <= t; ++e) prefix += buzz_mass(c, e) * g[e];
    k_total += h_inc[t] * prefix;
    h_total += h_inc[t];
  }
  return static_cast<double>(k_total + (1.0L - h_total) * s_q);
}

// Exact rational h_t: (correct up to t, total up to t).
struct Ratio {
  int num = 0;
  int den = 0;
};

inline std::vector<Ratio> human_curve(const std::vector<buzzcal::BuzzRecord>& buzzes, int n) {
  std::vector<Ratio> out(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    for (const auto& b : buzzes) {
      if (b.t <= t) {
        ++out[static_cast<std::size_t>(t)].den;
        if (b.correct) ++out[static_cast<std::size_t>(t)].num;
      }
    }
  }
  return out;
}

}  // namespace oracle
