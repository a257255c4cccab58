#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "buzzcal/error.hpp"
#include "buzzcal/metrics.hpp"
#include "oracle.hpp"
#include "generators.hpp"

using namespace buzzcal;

namespace {

// Reference values computed with 40-digit arithmetic.
constexpr double kR05 = 0.7649962877984055;
constexpr double kOneMinusR02 = 0.3921615513954206;
constexpr double kOneMinusR01 = 0.4459462019825300;

CalScoreInput uniform_input(int n, int g, double c, double h) {
  return {std::vector<int>(n, g), std::vector<double>(n, c), std::vector<double>(n, h)};
}

template <typename F>
void expect_throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(NormalizedSigmoid, Endpoints) {
  EXPECT_EQ(normalized_sigmoid(-1.0), 0.0);
  EXPECT_EQ(normalized_sigmoid(1.0), 1.0);
  EXPECT_NEAR(normalized_sigmoid(0.0), 0.5, 1e-15);
}

TEST(NormalizedSigmoid, HalfMatchesReference) {
  EXPECT_NEAR(normalized_sigmoid(0.5), kR05, 1e-15);
}

TEST(NormalizedSigmoid, RejectsOutsideDomain) {
  expect_throws_kind([] { normalized_sigmoid(1.01); }, ErrorKind::Domain);
  expect_throws_kind([] { normalized_sigmoid(-1.5); }, ErrorKind::Domain);
  expect_throws_kind([] { normalized_sigmoid(std::nan("")); }, ErrorKind::Domain);
  EXPECT_NO_THROW(normalized_sigmoid(1.0 + 1e-10));
}

TEST(NormalizedSigmoid, StrictlyIncreasingAndSymmetric) {
  double prev = -1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + i * 0.001;
    const double v = normalized_sigmoid(x);
    EXPECT_GT(v, prev);
    prev = v;
    EXPECT_NEAR(normalized_sigmoid(-x), 1.0 - v, 1e-12);
  }
}

TEST(Mce, Examples) {
  EXPECT_NEAR(mce_q(uniform_input(4, 1, 1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(mce_q(uniform_input(4, -1, 1.0, 0.0)), 1.0, 1e-15);
  EXPECT_NEAR(mce_q({{1, -1}, {0.8, 0.4}, {0, 0}}), kOneMinusR02, 1e-14);
}

TEST(CalScore, Examples) {
  EXPECT_NEAR(calscore_q(uniform_input(5, 1, 1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(calscore_q({{1, -1, 1}, {0.3, 0.9, 0.6}, {1, 1, 1}}), 0.5, 1e-15);
  EXPECT_NEAR(calscore_q({{1, -1}, {0.8, 0.4}, {0.5, 0.5}}), kOneMinusR01, 1e-14);
}

TEST(CalScore, InputChecks) {
  expect_throws_kind([] { calscore_q({{1}, {0.5, 0.5}, {0}}); }, ErrorKind::Domain);
  expect_throws_kind([] { calscore_q({{}, {}, {}}); }, ErrorKind::EmptyInput);
  expect_throws_kind([] { calscore_q({{2}, {0.5}, {0}}); }, ErrorKind::Domain);
  expect_throws_kind([] { calscore_q({{1}, {1.5}, {0}}); }, ErrorKind::Domain);
  expect_throws_kind([] { calscore_q({{1}, {0.5}, {-0.1}}); }, ErrorKind::Domain);
}

TEST(CalScoreDataset, Examples) {
  const std::vector<double> two{0.2, 0.4};
  EXPECT_NEAR(calscore_dataset(two), 0.3, 1e-15);
  const std::vector<double> one{0.37};
  EXPECT_EQ(calscore_dataset(one), 0.37);
  expect_throws_kind([] { calscore_dataset({}); }, ErrorKind::EmptyInput);
}

TEST(CalScoreDataset, MatchesNaiveMeanOverThousandQuestions) {
  gen::Rng rng(11);
  std::vector<double> values;
  long double total = 0.0L;
  for (int i = 0; i < 1000; ++i) {
    const auto in = gen::calscore_input(rng);
    values.push_back(calscore_q(in));
    total += oracle::calscore(in.g, in.c, in.h);
  }
  EXPECT_NEAR(calscore_dataset(values), static_cast<double>(total / 1000.0L), 1e-12);
}

TEST(CalScore, HumanZeroEqualsMce) {
  gen::Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    auto in = gen::calscore_input(rng);
    std::fill(in.h.begin(), in.h.end(), 0.0);
    EXPECT_EQ(calscore_q(in), mce_q(in));
  }
}

TEST(CalScore, RangeAndAllCorrectDominance) {
  gen::Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    auto in = gen::calscore_input(rng);
    const double cs = calscore_q(in), m = mce_q(in);
    EXPECT_GE(cs, 0.0);
    EXPECT_LE(cs, 1.0);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
    std::fill(in.g.begin(), in.g.end(), 1);
    EXPECT_GE(calscore_q(in), mce_q(in));
  }
}

TEST(CalScore, JointShuffleInvariance) {
  gen::Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    const auto in = gen::calscore_input(rng);
    std::vector<std::size_t> order(in.g.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    CalScoreInput shuffled;
    for (auto k : order) {
      shuffled.g.push_back(in.g[k]);
      shuffled.c.push_back(in.c[k]);
      shuffled.h.push_back(in.h[k]);
    }
    EXPECT_NEAR(calscore_q(shuffled), calscore_q(in), 1e-12);
    EXPECT_NEAR(mce_q(shuffled), mce_q(in), 1e-12);
  }
}

TEST(CalScore, MatchesOracle) {
  gen::Rng rng(15);
  for (int i = 0; i < 1000; ++i) {
    const auto in = gen::calscore_input(rng);
    EXPECT_NEAR(calscore_q(in), oracle::calscore(in.g, in.c, in.h), 1e-9);
    EXPECT_NEAR(mce_q(in), oracle::mce(in.g, in.c), 1e-9);
  }
}

TEST(Ece, Examples) {
  const std::vector<BinaryStep> perfect(6, BinaryStep{1, 1.0});
  EXPECT_EQ(ece(perfect), 0.0);
  const std::vector<BinaryStep> wrong(6, BinaryStep{0, 1.0});
  EXPECT_EQ(ece(wrong), 1.0);
  expect_throws_kind([] { ece({}); }, ErrorKind::EmptyInput);
}

TEST(Ece, ConstructedCalibratedBinsGiveZero) {
  // Bin [0.2,0.3): confidences average 0.25, one of four correct.
  // Bin [0.7,0.8): confidences average 0.75, three of four correct.
  // Bin [0.9,1.0]: confidence 1.0, all correct.
  const std::vector<BinaryStep> steps{
      {1, 0.22}, {0, 0.28}, {0, 0.24}, {0, 0.26}, {1, 0.71}, {1, 0.79},
      {0, 0.75}, {1, 0.75}, {1, 1.0},  {1, 1.0},
  };
  EXPECT_NEAR(ece(steps), 0.0, 1e-12);
}

TEST(Ece, TopBinClosedAndBinCountsSum) {
  EXPECT_EQ(bin_index(1.0, 10), 9);
  EXPECT_EQ(bin_index(0.0, 10), 0);
  EXPECT_EQ(bin_index(0.95, 10), 9);
  EXPECT_EQ(bin_index(0.5, 1), 0);
  gen::Rng rng(16);
  std::vector<BinaryStep> steps;
  for (int i = 0; i < 300; ++i) steps.push_back({gen::unit(rng) < 0.5 ? 1 : 0, gen::confidence(rng)});
  for (int m : {1, 3, 10, 17}) {
    const auto bins = bin_steps(steps, m);
    ASSERT_EQ(bins.size(), static_cast<std::size_t>(m));
    int total = 0;
    for (const auto& b : bins) total += b.count;
    EXPECT_EQ(total, 300);
  }
  expect_throws_kind([&] { ece(steps, 0); }, ErrorKind::Domain);
}

TEST(Brier, Examples) {
  const std::vector<BinaryStep> right{{1, 1.0}};
  EXPECT_EQ(brier(right), 0.0);
  const std::vector<BinaryStep> wrong{{0, 1.0}};
  EXPECT_EQ(brier(wrong), 1.0);
  const std::vector<BinaryStep> mixed{{1, 0.8}, {0, 0.4}};
  EXPECT_NEAR(brier(mixed), 0.10, 1e-15);
  expect_throws_kind([] { brier({}); }, ErrorKind::EmptyInput);
}

TEST(EceBrier, MatchOracleAndArePermutationInvariant) {
  gen::Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const int n = gen::uniform_int(rng, 1, 40);
    std::vector<BinaryStep> steps;
    std::vector<int> g;
    std::vector<double> c;
    for (int k = 0; k < n; ++k) {
      steps.push_back({gen::unit(rng) < 0.5 ? 1 : 0, gen::confidence(rng)});
      g.push_back(steps.back().g);
      c.push_back(steps.back().c);
    }
    const int bins = gen::uniform_int(rng, 1, 15);
    const double e = ece(steps, bins);
    EXPECT_NEAR(e, oracle::ece(g, c, bins), 1e-9);
    EXPECT_NEAR(brier(steps), oracle::brier(g, c), 1e-9);
    std::shuffle(steps.begin(), steps.end(), rng);
    EXPECT_NEAR(ece(steps, bins), e, 1e-12);
  }
}

TEST(ShQ, Examples) {
  const std::vector<double> c1{1.0, 1.0, 1.0};
  const std::vector<int> g1{1, 1, 1};
  const std::vector<double> h0{0.0, 0.0, 0.0};
  EXPECT_EQ(sh_q(c1, g1, h0), 1.0);

  const std::vector<double> c{0.5, 0.5};
  const std::vector<int> g{1, 0};
  const std::vector<double> h{0.5, 0.5};
  const auto terms = sh_q_terms(c, g, h);
  EXPECT_NEAR(terms.b[0], 0.5, 1e-15);
  EXPECT_NEAR(terms.b[1], 0.5, 1e-15);
  EXPECT_NEAR(terms.k[0], 0.25, 1e-15);
  EXPECT_NEAR(terms.k[1], 0.25, 1e-15);
  EXPECT_NEAR(terms.sh_q, 0.5, 1e-12);
}

TEST(ShQ, ZeroHumanMassEqualsSq) {
  gen::Rng rng(18);
  for (int i = 0; i < 500; ++i) {
    const auto in = gen::calscore_input(rng);
    const auto g = gen::binary(in.g);
    const std::vector<double> zero(in.c.size(), 0.0);
    const auto terms = sh_q_terms(in.c, g, zero);
    EXPECT_EQ(terms.sh_q, terms.s_q);
  }
}

TEST(ShQ, MassesSumToOneAndRangeHolds) {
  gen::Rng rng(19);
  for (int i = 0; i < 500; ++i) {
    const auto in = gen::calscore_input(rng);
    const auto b = buzz_masses(in.c);
    EXPECT_NEAR(std::accumulate(b.begin(), b.end(), 0.0), 1.0, 1e-12);
    const auto g = gen::binary(in.g);
    const auto h = gen::incremental_mass(rng, static_cast<int>(in.c.size()));
    const double v = sh_q(in.c, g, h);
    EXPECT_GE(v, -1e-12);
    EXPECT_LE(v, 1.0 + 1e-12);
  }
}

TEST(ShQ, MatchesQuadraticOracle) {
  gen::Rng rng(20);
  for (int i = 0; i < 1000; ++i) {
    const auto in = gen::calscore_input(rng);
    const auto g = gen::binary(in.g);
    const auto h = gen::incremental_mass(rng, static_cast<int>(in.c.size()));
    EXPECT_NEAR(sh_q(in.c, g, h), oracle::sh_q(in.c, g, h), 1e-9);
  }
}

TEST(ShQ, Errors) {
  const std::vector<double> c{0.5, 0.5};
  const std::vector<int> g{1, 0};
  const std::vector<double> too_much{0.6, 0.6};
  expect_throws_kind([&] { sh_q(c, g, too_much); }, ErrorKind::Domain);
  const std::vector<double> short_h{0.1};
  expect_throws_kind([&] { sh_q(c, g, short_h); }, ErrorKind::Domain);
}

TEST(ShQ, IncrementalConversions) {
  const std::vector<double> cumulative{0.0, 1.0, 0.5};
  const auto inc = incremental_from_curve(cumulative);
  ASSERT_EQ(inc.size(), 3u);
  EXPECT_EQ(inc[0], 0.0);
  EXPECT_EQ(inc[1], 1.0);
  EXPECT_EQ(inc[2], 0.0);

  const std::vector<double> rising{0.3, 0.6, 0.9};
  const auto r = incremental_from_curve(rising);
  EXPECT_NEAR(r[0] + r[1] + r[2], 0.9, 1e-15);

  gen::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> h(static_cast<std::size_t>(gen::uniform_int(rng, 1, 10)));
    for (auto& x : h) x = gen::unit(rng);
    const auto d = incremental_from_curve(h);
    double total = 0.0;
    for (double x : d) {
      EXPECT_GE(x, 0.0);
      total += x;
    }
    EXPECT_LE(total, 1.0 + 1e-12);
  }

  const Question q = gen::question("q", 3);
  std::vector<BuzzRecord> buzzes(4);
  for (auto& b : buzzes) b.qid = "q";
  buzzes[0].t = 0;
  buzzes[0].correct = true;
  buzzes[1].t = 2;
  buzzes[1].correct = true;
  buzzes[2].t = 2;
  buzzes[3].t = 1;
  const auto fc = incremental_first_correct(q, buzzes);
  EXPECT_EQ(fc, (std::vector<double>{0.25, 0.0, 0.25}));
}

TEST(Monotonicity, RaisingConfidence) {
  gen::Rng rng(22);
  for (int i = 0; i < 500; ++i) {
    const auto in = gen::calscore_input(rng);
    const auto t = static_cast<std::size_t>(gen::uniform_int(rng, 0, static_cast<int>(in.c.size()) - 1));
    auto up = in;
    up.c[t] = in.c[t] + (1.0 - in.c[t]) * gen::unit(rng);
    if (in.g[t] > 0) {
      EXPECT_LE(mce_q(up), mce_q(in));
      EXPECT_LE(calscore_q(up), calscore_q(in));
    } else {
      EXPECT_GE(mce_q(up), mce_q(in));
      EXPECT_GE(calscore_q(up), calscore_q(in));
    }
  }
}
