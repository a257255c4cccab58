#include "buzzcal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "buzzcal/confidence.hpp"
#include "buzzcal/error.hpp"
#include "buzzcal/human_stats.hpp"

namespace buzzcal {
namespace {

constexpr double kDomainTolerance = 1e-9;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorKind::EmptyInput, what);
}

}  // namespace

double normalized_sigmoid(double x) {
  if (!(x >= -1.0 - kDomainTolerance && x <= 1.0 + kDomainTolerance)) {
    throw Error(ErrorKind::Domain, "r(x) needs x in [-1,1], got " + std::to_string(x));
  }
  x = std::clamp(x, -1.0, 1.0);
  if (x == -1.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double lo = sigmoid(-1.0);
  return (sigmoid(x) - lo) / (sigmoid(1.0) - lo);
}

void CalScoreInput::check() const {
  if (g.empty()) throw Error(ErrorKind::EmptyInput, "question has no scored clues");
  if (c.size() != g.size() || h.size() != g.size()) {
    throw Error(ErrorKind::Domain, "g, c and h must have equal length");
  }
  for (std::size_t t = 0; t < g.size(); ++t) {
    if (g[t] != 1 && g[t] != -1) throw Error(ErrorKind::Domain, "g_t must be +1 or -1");
    if (!(c[t] >= 0.0 && c[t] <= 1.0)) throw Error(ErrorKind::Domain, "c_t outside [0,1]");
    if (!(h[t] >= 0.0 && h[t] <= 1.0)) throw Error(ErrorKind::Domain, "h_t outside [0,1]");
  }
}

double mce_q(const CalScoreInput& input) {
  input.check();
  double s = 0.0;
  for (std::size_t t = 0; t < input.g.size(); ++t) s += input.g[t] * input.c[t];
  return 1.0 - normalized_sigmoid(s / static_cast<double>(input.g.size()));
}

double calscore_q(const CalScoreInput& input) {
  input.check();
  double s = 0.0;
  for (std::size_t t = 0; t < input.g.size(); ++t) {
    s += (1.0 - input.h[t]) * input.g[t] * input.c[t];
  }
  return 1.0 - normalized_sigmoid(s / static_cast<double>(input.g.size()));
}

double calscore_dataset(std::span<const double> per_question) {
  require_nonempty(per_question.size(), "no per-question scores");
  return mean(per_question);
}

int bin_index(double c, int bins) {
  if (bins < 1) throw Error(ErrorKind::Domain, "bin count must be >= 1");
  if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::Domain, "confidence outside [0,1]");
  return std::min(static_cast<int>(std::floor(c * bins)), bins - 1);
}

std::vector<Bin> bin_steps(std::span<const BinaryStep> steps, int bins) {
  std::vector<Bin> out(static_cast<std::size_t>(std::max(bins, 1)));
  for (const auto& s : steps) {
    Bin& b = out[static_cast<std::size_t>(bin_index(s.c, bins))];
    ++b.count;
    b.sum_g += s.g;
    b.sum_c += s.c;
  }
  return out;
}

double ece(std::span<const BinaryStep> steps, int bins) {
  require_nonempty(steps.size(), "no steps for ECE");
  double total = 0.0;
  for (const Bin& b : bin_steps(steps, bins)) total += std::abs(b.sum_g - b.sum_c);
  return total / static_cast<double>(steps.size());
}

double brier(std::span<const BinaryStep> steps) {
  require_nonempty(steps.size(), "no steps for Brier");
  double total = 0.0;
  for (const auto& s : steps) total += (s.c - s.g) * (s.c - s.g);
  return total / static_cast<double>(steps.size());
}

std::vector<double> buzz_masses(std::span<const double> c) {
  std::vector<double> b(c.size(), 0.0);
  double survive = 1.0;
  for (std::size_t t = 0; t < c.size(); ++t) {
    const double conf = t + 1 == c.size() ? 1.0 : c[t];
    b[t] = conf * survive;
    survive *= 1.0 - conf;
  }
  return b;
}

ShQTerms sh_q_terms(std::span<const double> c, std::span<const int> g,
                    std::span<const double> h_inc) {
  require_nonempty(c.size(), "no steps for SH_q");
  if (g.size() != c.size() || h_inc.size() != c.size()) {
    throw Error(ErrorKind::Domain, "c, g and h_inc must have equal length");
  }
  double h_total = 0.0;
  for (double h : h_inc) {
    if (!(h >= 0.0 && h <= 1.0)) throw Error(ErrorKind::Domain, "h_inc outside [0,1]");
    h_total += h;
  }
  if (h_total > 1.0 + kDomainTolerance) {
    throw Error(ErrorKind::Domain, "incremental human mass sums to " + std::to_string(h_total));
  }
  for (std::size_t t = 0; t < c.size(); ++t) {
    if (g[t] != 0 && g[t] != 1) throw Error(ErrorKind::Domain, "g_t must be 0 or 1");
    if (!(c[t] >= 0.0 && c[t] <= 1.0)) throw Error(ErrorKind::Domain, "c_t outside [0,1]");
  }

  ShQTerms out;
  out.b = buzz_masses(c);
  out.k.resize(c.size());
  double prefix = 0.0;
  double k_total = 0.0;
  for (std::size_t t = 0; t < c.size(); ++t) {
    prefix += out.b[t] * g[t];
    out.k[t] = h_inc[t] * prefix;
    k_total += out.k[t];
  }
  out.s_q = prefix;
  out.sh_q = k_total + (1.0 - h_total) * out.s_q;
  return out;
}

double sh_q(std::span<const double> c, std::span<const int> g, std::span<const double> h_inc) {
  return sh_q_terms(c, g, h_inc).sh_q;
}

std::optional<ShqHumanMode> parse_shq_mode(std::string_view s) {
  if (s == "difference") return ShqHumanMode::difference;
  if (s == "first_correct") return ShqHumanMode::first_correct;
  return std::nullopt;
}

std::string_view to_string(ShqHumanMode m) {
  return m == ShqHumanMode::difference ? "difference" : "first_correct";
}

std::vector<double> incremental_from_curve(std::span<const double> cumulative_h) {
  std::vector<double> out(cumulative_h.size(), 0.0);
  double prev = 0.0;
  double used = 0.0;
  for (std::size_t t = 0; t < cumulative_h.size(); ++t) {
    const double step = std::max(0.0, cumulative_h[t] - prev);
    out[t] = std::min(step, std::max(0.0, 1.0 - used));
    used += out[t];
    prev = cumulative_h[t];
  }
  return out;
}

std::vector<double> incremental_first_correct(const Question& question,
                                              std::span<const BuzzRecord> buzzes) {
  std::vector<double> out(question.clues.size(), 0.0);
  int total = 0;
  for (const auto& b : buzzes) {
    if (b.qid != question.qid) {
      throw Error(ErrorKind::ForeignBuzz, "buzz for " + b.qid + " given to " + question.qid);
    }
    ++total;
    if (b.correct && b.t >= 0 && static_cast<std::size_t>(b.t) < out.size()) {
      out[static_cast<std::size_t>(b.t)] += 1.0;
    }
  }
  if (total > 0) {
    for (double& v : out) v /= total;
  }
  return out;
}

namespace {

struct PreparedQuestion {
  const Question* question = nullptr;
  std::vector<int> t;
  std::vector<int> g_binary;
  std::vector<double> c;
};

struct ScoredQuestion {
  QuestionMetrics metrics;
  bool scored = false;
};

AggregateMetrics aggregate(std::span<const PreparedQuestion* const> prepared,
                           std::span<const ScoredQuestion* const> scored, int bins) {
  AggregateMetrics agg;
  std::vector<double> cal, mce, shq;
  std::vector<BinaryStep> steps;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    if (!scored[i]->scored) continue;
    cal.push_back(scored[i]->metrics.calscore);
    mce.push_back(scored[i]->metrics.mce);
    shq.push_back(scored[i]->metrics.sh_q);
    for (std::size_t k = 0; k < prepared[i]->c.size(); ++k) {
      steps.push_back({prepared[i]->g_binary[k], prepared[i]->c[k]});
    }
  }
  agg.questions = static_cast<int>(cal.size());
  agg.steps = static_cast<int>(steps.size());
  if (cal.empty()) return agg;
  agg.calscore_D = calscore_dataset(cal);
  agg.mce_D = mean(mce);
  agg.sh_q_mean = mean(shq);
  agg.ece = ece(steps, bins);
  agg.brier = brier(steps);
  return agg;
}

}  // namespace

MetricReport metric_report(const DatasetBundle& bundle, const std::string& model_id,
                           Channel channel, const ReportOptions& options) {
  std::map<std::string, const Question*> questions;
  for (const auto& q : bundle.questions) questions.emplace(q.qid, &q);
  std::map<std::string, std::vector<BuzzRecord>> human_buzzes;
  for (const auto& b : bundle.buzzes) {
    if (b.team_kind == TeamKind::human) human_buzzes[b.qid].push_back(b);
  }

  std::vector<const GuessTrace*> traces;
  for (const auto& tr : bundle.traces) {
    if (tr.model_id == model_id) traces.push_back(&tr);
  }
  std::sort(traces.begin(), traces.end(),
            [](const GuessTrace* a, const GuessTrace* b) { return a->qid < b->qid; });

  MetricReport report;
  report.model_id = model_id;
  report.confidence_channel = channel;

  std::vector<PreparedQuestion> prepared;
  std::string missing;
  for (const GuessTrace* tr : traces) {
    auto q = questions.find(tr->qid);
    if (q == questions.end()) {
      throw Error(ErrorKind::Domain, "trace references unknown question " + tr->qid);
    }
    PreparedQuestion p;
    p.question = q->second;
    std::vector<const GuessStep*> steps;
    for (const auto& s : tr->steps) steps.push_back(&s);
    std::sort(steps.begin(), steps.end(),
              [](const GuessStep* a, const GuessStep* b) { return a->t < b->t; });
    for (const GuessStep* s : steps) {
      if (s->correct == Correctness::unresolved) {
        throw Error(ErrorKind::UnresolvedCorrectness,
                    "qid " + tr->qid + " t=" + std::to_string(s->t) + " model " + model_id);
      }
      std::optional<double> c = channel == Channel::logit ? s->logit_conf : s->verbalized_conf;
      if (!c && channel == Channel::verbalized && s->raw_output) {
        c = extract_verbalized_confidence(*s->raw_output);
        if (!c) {
          ++report.skipped_steps;
          continue;
        }
      }
      if (!c) {
        missing += " (" + tr->qid + "," + std::to_string(s->t) + ")";
        continue;
      }
      p.t.push_back(s->t);
      p.g_binary.push_back(Outcome::from(s->correct).binary());
      p.c.push_back(*c);
    }
    prepared.push_back(std::move(p));
  }
  if (!missing.empty()) {
    throw Error(ErrorKind::MissingChannel, "model " + model_id + " lacks " +
                                               std::string(to_string(channel)) + " at" + missing);
  }

  std::vector<ScoredQuestion> scored(prepared.size());
  auto score_one = [&](std::size_t i) {
    const PreparedQuestion& p = prepared[i];
    if (p.c.empty()) return;
    const Question& q = *p.question;
    static const std::vector<BuzzRecord> kNone;
    auto hb = human_buzzes.find(q.qid);
    const auto& buzzes = hb == human_buzzes.end() ? kNone : hb->second;
    const HumanCurve curve = human_curve(q, buzzes);
    const std::vector<double> h_inc_full = options.shq_mode == ShqHumanMode::difference
                                               ? incremental_from_curve(curve.h)
                                               : incremental_first_correct(q, buzzes);
    CalScoreInput in;
    std::vector<double> h_inc;
    for (std::size_t k = 0; k < p.c.size(); ++k) {
      const auto t = static_cast<std::size_t>(p.t[k]);
      in.g.push_back(p.g_binary[k] == 1 ? 1 : -1);
      in.c.push_back(p.c[k]);
      in.h.push_back(curve.h.at(t));
      h_inc.push_back(h_inc_full.at(t));
    }
    ScoredQuestion& out = scored[i];
    out.metrics.calscore = calscore_q(in);
    out.metrics.mce = mce_q(in);
    out.metrics.sh_q = sh_q(p.c, p.g_binary, h_inc);
    out.metrics.n_clues = static_cast<int>(p.c.size());
    out.scored = true;
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)), prepared.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < prepared.size(); ++i) score_one(i);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < prepared.size(); i += workers) score_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Reductions run in qid order regardless of the worker count.
  std::vector<const PreparedQuestion*> all_p;
  std::vector<const ScoredQuestion*> all_s;
  std::map<Category, std::pair<std::vector<const PreparedQuestion*>, std::vector<const ScoredQuestion*>>>
      by_cat;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    all_p.push_back(&prepared[i]);
    all_s.push_back(&scored[i]);
    if (scored[i].scored) {
      report.per_question.emplace(prepared[i].question->qid, scored[i].metrics);
      auto& [ps, ss] = by_cat[prepared[i].question->category];
      ps.push_back(&prepared[i]);
      ss.push_back(&scored[i]);
    }
  }
  report.aggregate = aggregate(all_p, all_s, options.ece_bins);
  for (const auto& [cat, lists] : by_cat) {
    report.per_category.emplace(cat, aggregate(lists.first, lists.second, options.ece_bins));
  }
  return report;
}

std::vector<MetricReport> metric_reports(const DatasetBundle& bundle, Channel channel,
                                         const ReportOptions& options) {
  std::set<std::string> models;
  for (const auto& tr : bundle.traces) models.insert(tr.model_id);
  std::vector<MetricReport> out;
  for (const auto& m : models) out.push_back(metric_report(bundle, m, channel, options));
  return out;
}

}  // namespace buzzcal
