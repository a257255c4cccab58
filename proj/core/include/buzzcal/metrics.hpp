#pragma once

#include <span>
#include <vector>

#include "buzzcal/ingest.hpp"
#include "buzzcal/types.hpp"

namespace buzzcal {

// Normalized sigmoid mapping [-1, 1] onto [0, 1].
double normalized_sigmoid(double x);

// Aligned per-clue series for one question.
struct CalScoreInput {
  std::vector<int> g;     // +1 / -1
  std::vector<double> c;  // confidence in [0, 1]
  std::vector<double> h;  // cumulative human correct-buzz probability

  void check() const;
};

double mce_q(const CalScoreInput& input);
double calscore_q(const CalScoreInput& input);
double calscore_dataset(std::span<const double> per_question);

struct BinaryStep {
  int g = 0;  // 1 / 0
  double c = 0.0;
};

struct Bin {
  int count = 0;
  double sum_g = 0.0;
  double sum_c = 0.0;
};

// Equal-width bins over [0, 1]; the top bin is closed.
int bin_index(double c, int bins);
std::vector<Bin> bin_steps(std::span<const BinaryStep> steps, int bins);

double ece(std::span<const BinaryStep> steps, int bins = 10);
double brier(std::span<const BinaryStep> steps);

// Buzz masses b_t = c_t * prod_{i<t}(1 - c_i) with the final confidence
// forced to 1 so the masses sum to 1.
std::vector<double> buzz_masses(std::span<const double> c);

struct ShQTerms {
  std::vector<double> b;
  double s_q = 0.0;
  std::vector<double> k;
  double sh_q = 0.0;
};

// h_inc is the per-step increment of human correct-buzz mass (sums to <= 1).
ShQTerms sh_q_terms(std::span<const double> c, std::span<const int> g,
                    std::span<const double> h_inc);
double sh_q(std::span<const double> c, std::span<const int> g, std::span<const double> h_inc);

// How the incremental human mass for SH_q is obtained.
enum class ShqHumanMode {
  difference,     // positive increments of the cumulative curve, capped at total 1
  first_correct,  // correct buzzes at t over all buzzes on the question
};

std::optional<ShqHumanMode> parse_shq_mode(std::string_view s);
std::string_view to_string(ShqHumanMode m);

std::vector<double> incremental_from_curve(std::span<const double> cumulative_h);
std::vector<double> incremental_first_correct(const Question& question,
                                              std::span<const BuzzRecord> buzzes);

struct ReportOptions {
  int ece_bins = 10;
  ShqHumanMode shq_mode = ShqHumanMode::difference;
  int threads = 1;
};

// One report for `model_id` on the selected channel. Correctness must be
// resolved. Throws MissingChannel listing every (qid, t) lacking the channel;
// verbalized steps whose raw output could not be parsed are skipped and
// counted instead.
MetricReport metric_report(const DatasetBundle& bundle, const std::string& model_id,
                           Channel channel, const ReportOptions& options = {});

// Reports for every model in the bundle, sorted by model id.
std::vector<MetricReport> metric_reports(const DatasetBundle& bundle, Channel channel,
                                         const ReportOptions& options = {});

}  // namespace buzzcal
