#include "buzzcal/buzzer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "buzzcal/error.hpp"
#include "buzzcal/human_stats.hpp"

namespace buzzcal {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::optional<ThresholdChannel> parse_threshold_channel(std::string_view s) {
  if (s == "logprob_sum") return ThresholdChannel::logprob_sum;
  if (s == "logit_conf") return ThresholdChannel::logit_conf;
  if (s == "verbalized_conf") return ThresholdChannel::verbalized_conf;
  return std::nullopt;
}

std::string_view to_string(ThresholdChannel c) {
  switch (c) {
    case ThresholdChannel::logprob_sum: return "logprob_sum";
    case ThresholdChannel::logit_conf: return "logit_conf";
    case ThresholdChannel::verbalized_conf: return "verbalized_conf";
  }
  return "logprob_sum";
}

std::optional<double> channel_value(const GuessStep& step, ThresholdChannel channel) {
  switch (channel) {
    case ThresholdChannel::logprob_sum: return step.logprob_sum;
    case ThresholdChannel::logit_conf: return step.logit_conf;
    case ThresholdChannel::verbalized_conf: return step.verbalized_conf;
  }
  return std::nullopt;
}

std::optional<BuzzThreshold> default_threshold(std::string_view model_id) {
  const std::string id = lower(model_id);
  if (id.find("gpt") != std::string::npos) return BuzzThreshold{"gpt", kGptThreshold};
  if (id.find("mistral") != std::string::npos) return BuzzThreshold{"mistral", kMistralThreshold};
  return std::nullopt;
}

void ThresholdTable::set(std::string model_id, double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::Config, "threshold must be finite");
  values_[std::move(model_id)] = value;
}

std::optional<BuzzThreshold> ThresholdTable::lookup(std::string_view model_id) const {
  if (auto it = values_.find(model_id); it != values_.end()) {
    return BuzzThreshold{it->first, it->second, channel};
  }
  if (auto d = default_threshold(model_id)) {
    d->channel = channel;
    return d;
  }
  return std::nullopt;
}

ThresholdTable ThresholdTable::parse(std::string_view spec) {
  ThresholdTable table;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string item = trim(spec.substr(start, end - start));
    start = end + 1;
    if (item.empty()) continue;
    const auto eq = item.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::Config, "threshold entry \"" + item + "\" is not model=value");
    }
    const std::string value = trim(std::string_view(item).substr(eq + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw Error(ErrorKind::Config, "threshold value \"" + value + "\" is not a number");
    }
    table.set(trim(std::string_view(item).substr(0, eq)), v);
  }
  return table;
}

nlohmann::json to_json(const Buzzpoint& bp) {
  nlohmann::json obj = {{"qid", bp.qid}, {"model_id", bp.model_id}};
  if (bp.t) {
    obj["t"] = *bp.t;
    obj["guess"] = bp.guess;
    obj["correct"] = bp.correct == Correctness::unresolved
                         ? nlohmann::json(nullptr)
                         : nlohmann::json(bp.correct == Correctness::correct);
  } else {
    obj["t"] = nullptr;
    obj["guess"] = nullptr;
    obj["correct"] = nullptr;
  }
  return obj;
}

Buzzpoint find_buzzpoint(const GuessTrace& trace, const BuzzThreshold& threshold) {
  std::vector<const GuessStep*> steps;
  for (const auto& s : trace.steps) steps.push_back(&s);
  std::sort(steps.begin(), steps.end(),
            [](const GuessStep* a, const GuessStep* b) { return a->t < b->t; });

  Buzzpoint bp{trace.qid, trace.model_id, std::nullopt, {}, Correctness::unresolved};
  for (const GuessStep* s : steps) {
    const auto c = channel_value(*s, threshold.channel);
    if (!c) {
      throw Error(ErrorKind::MissingChannel, "qid " + trace.qid + " t=" + std::to_string(s->t) +
                                                 " lacks " + std::string(to_string(threshold.channel)));
    }
    if (*c > threshold.value) {
      bp.t = s->t;
      bp.guess = s->guess;
      bp.correct = s->correct;
      break;
    }
  }
  return bp;
}

double eval_pi_raw(const HumanAccuracyCurve& curve, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::Domain, "curve position must lie in [0,1], got " + std::to_string(t));
  }
  if (const auto* poly = std::get_if<PolynomialCurve>(&curve.form)) {
    return t * (poly->a1 + t * (poly->a2 + t * poly->a3));
  }
  const auto& emp = std::get<EmpiricalCurve>(curve.form);
  // Last knot at or before t.
  auto it = std::upper_bound(emp.positions.begin(), emp.positions.end(), t + 1e-12);
  if (it == emp.positions.begin()) return 0.0;
  return emp.values[static_cast<std::size_t>(it - emp.positions.begin() - 1)];
}

double eval_pi(const HumanAccuracyCurve& curve, double t) {
  return std::clamp(eval_pi_raw(curve, t), 0.0, 1.0);
}

double answered_by(const HumanAccuracyCurve& curve, double t) {
  const double v = eval_pi(curve, t);
  return curve.orientation == CurveOrientation::answered_by ? v : 1.0 - v;
}

double not_answered_by(const HumanAccuracyCurve& curve, double t) {
  return 1.0 - answered_by(curve, t);
}

HumanAccuracyCurve empirical_from_human_curve(const HumanCurve& curve) {
  EmpiricalCurve emp;
  const int n = static_cast<int>(curve.h.size());
  for (int t = 0; t < n; ++t) {
    emp.positions.push_back(buzz_fraction(t, n));
    emp.values.push_back(curve.h[static_cast<std::size_t>(t)]);
  }
  return {std::move(emp), CurveOrientation::answered_by};
}

HumanAccuracyCurve empirical_from_buzzes(std::span<const BuzzRecord> buzzes, double grid_step) {
  EmpiricalCurve emp;
  emp.positions = position_grid(grid_step);
  std::vector<double> correct;
  for (const auto& b : buzzes) {
    if (b.correct) correct.push_back(b.position_frac);
  }
  std::sort(correct.begin(), correct.end());
  const double total = static_cast<double>(buzzes.size());
  for (double p : emp.positions) {
    const auto k = std::upper_bound(correct.begin(), correct.end(), p + 1e-12) - correct.begin();
    emp.values.push_back(total == 0.0 ? 0.0 : static_cast<double>(k) / total);
  }
  return {std::move(emp), CurveOrientation::answered_by};
}

ThresholdFit fit_threshold(std::span<const GuessTrace> traces, const HumanAccuracyCurve& curve,
                           std::span<const double> grid, double penalty, ThresholdChannel channel) {
  if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "no candidate thresholds");
  if (!(penalty >= 0.0)) throw Error(ErrorKind::Domain, "penalty must be >= 0");
  if (traces.empty()) throw Error(ErrorKind::EmptyInput, "no traces to fit");
  for (const auto& tr : traces) {
    for (const auto& s : tr.steps) {
      if (s.correct == Correctness::unresolved) {
        throw Error(ErrorKind::UnresolvedCorrectness,
                    "qid " + tr.qid + " t=" + std::to_string(s.t) + " model " + tr.model_id);
      }
    }
  }

  ThresholdFit fit;
  bool have_best = false;
  for (double theta : grid) {
    const BuzzThreshold th{"", theta, channel};
    ThresholdPayoff row{theta, 0.0, 0, 0};
    double total = 0.0;
    for (const auto& tr : traces) {
      const Buzzpoint bp = find_buzzpoint(tr, th);
      if (!bp.t) continue;
      ++row.buzzes;
      if (bp.correct == Correctness::correct) {
        ++row.correct_buzzes;
        const int n = static_cast<int>(tr.steps.size());
        total += 1.0 - answered_by(curve, buzz_fraction(*bp.t, n));
      } else {
        total -= penalty;
      }
    }
    row.payoff = total / static_cast<double>(traces.size());
    fit.table.push_back(row);
    if (!have_best || row.payoff > fit.best_payoff ||
        (row.payoff == fit.best_payoff && theta < fit.best_theta)) {
      fit.best_theta = theta;
      fit.best_payoff = row.payoff;
      have_best = true;
    }
  }
  return fit;
}

std::vector<double> threshold_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) {
    throw Error(ErrorKind::Config, "threshold grid needs from <= to and step > 0");
  }
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  // Steps like 0.01 are snapped to k/100 so the printed thetas stay clean.
  const double inv = std::round(1.0 / step);
  const double k0 = std::round(from * inv);
  const bool snapped = std::abs(inv * step - 1.0) < 1e-12 && std::abs(k0 - from * inv) < 1e-9;
  for (long k = 0; k <= n; ++k) {
    const auto kd = static_cast<double>(k);
    grid.push_back(snapped ? (k0 + kd) / inv : from + kd * step);
  }
  return grid;
}

}  // namespace buzzcal
