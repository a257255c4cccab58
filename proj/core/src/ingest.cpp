#include "buzzcal/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "buzzcal/confidence.hpp"
#include "buzzcal/error.hpp"

namespace buzzcal {
namespace {

using nlohmann::json;

// Thrown inside record converters; rethrown with the line number.
struct FieldError {
  std::string what;
};

const json& field(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw FieldError{std::string("missing field \"") + name + "\""};
  return *it;
}

std::string get_string(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_string()) throw FieldError{std::string("field \"") + name + "\" must be a string"};
  return v.get<std::string>();
}

int get_int(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_number_integer()) throw FieldError{std::string("field \"") + name + "\" must be an integer"};
  return v.get<int>();
}

double get_number(const json& v, const char* name) {
  if (!v.is_number()) throw FieldError{std::string("field \"") + name + "\" must be a number"};
  return v.get<double>();
}

bool get_bool(const json& obj, const char* name) {
  const json& v = field(obj, name);
  if (!v.is_boolean()) throw FieldError{std::string("field \"") + name + "\" must be a boolean"};
  return v.get<bool>();
}

std::optional<double> get_optional_number(const json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return get_number(*it, name);
}

std::set<std::string> get_string_set(const json& obj, const char* name) {
  std::set<std::string> out;
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw FieldError{std::string("field \"") + name + "\" must be an array"};
  for (const auto& v : *it) {
    if (!v.is_string()) throw FieldError{std::string("field \"") + name + "\" must hold strings"};
    out.insert(v.get<std::string>());
  }
  return out;
}

json extras(const json& obj, std::initializer_list<const char*> known) {
  json out = json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
      out[it.key()] = it.value();
    }
  }
  return out;
}

void merge_extras(json& obj, const json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!obj.contains(it.key())) obj[it.key()] = it.value();
  }
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
}

std::string trim(const std::string& s) {
  const auto lo = s.find_first_not_of(" \t");
  if (lo == std::string::npos) return {};
  return s.substr(lo, s.find_last_not_of(" \t") - lo + 1);
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorKind::MalformedLine,
                  "line " + std::to_string(line_no) + ": expected a JSON object");
    }
    try {
      fn(obj, line_no);
    } catch (const FieldError& e) {
      throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

Correctness parse_correctness(const json& step) {
  auto it = step.find("correct");
  if (it == step.end() || it->is_null()) return Correctness::unresolved;
  if (it->is_boolean()) return it->get<bool>() ? Correctness::correct : Correctness::incorrect;
  if (it->is_string() && it->get<std::string>() == "unresolved") return Correctness::unresolved;
  throw FieldError{"field \"correct\" must be a boolean, null or \"unresolved\""};
}

}  // namespace

std::vector<Question> parse_questions(std::istream& in) {
  std::vector<Question> out;
  std::set<std::string> seen;
  for_each_record(in, [&](const json& obj, int line_no) {
    Question q;
    q.qid = get_string(obj, "qid");
    const std::string category = get_string(obj, "category");
    auto cat = parse_category(category);
    if (!cat) throw FieldError{"unknown category \"" + category + "\""};
    q.category = *cat;
    const json& clues = field(obj, "clues");
    if (!clues.is_array()) throw FieldError{"field \"clues\" must be an array"};
    for (const auto& c : clues) {
      if (!c.is_string()) throw FieldError{"clues must be strings"};
      q.clues.push_back(c.get<std::string>());
    }
    if (q.clues.empty()) {
      throw Error(ErrorKind::EmptyClue, "qid " + q.qid + " has no clues (line " +
                                            std::to_string(line_no) + ")");
    }
    for (std::size_t i = 0; i < q.clues.size(); ++i) {
      if (blank(q.clues[i])) {
        throw Error(ErrorKind::EmptyClue, "qid " + q.qid + " clue " + std::to_string(i) +
                                              " is empty (line " + std::to_string(line_no) + ")");
      }
    }
    const json& answer = field(obj, "answer");
    if (!answer.is_object()) throw FieldError{"field \"answer\" must be an object"};
    q.answer.canonical = get_string(answer, "canonical");
    q.answer.accept_aliases = get_string_set(answer, "accept");
    q.answer.prompt_aliases = get_string_set(answer, "prompt");
    q.extra = extras(obj, {"qid", "category", "clues", "answer"});
    if (!seen.insert(q.qid).second) {
      throw Error(ErrorKind::DuplicateQid,
                  "qid " + q.qid + " repeated on line " + std::to_string(line_no));
    }
    out.push_back(std::move(q));
  });
  return out;
}

std::vector<GuessTrace> parse_traces(std::istream& in) {
  std::vector<GuessTrace> out;
  for_each_record(in, [&](const json& obj, int) {
    GuessTrace tr;
    tr.qid = get_string(obj, "qid");
    tr.model_id = get_string(obj, "model_id");
    const json& steps = field(obj, "steps");
    if (!steps.is_array()) throw FieldError{"field \"steps\" must be an array"};
    for (const auto& s : steps) {
      if (!s.is_object()) throw FieldError{"steps must be objects"};
      GuessStep step;
      step.t = get_int(s, "t");
      step.guess = get_string(s, "guess");
      step.correct = parse_correctness(s);
      step.logit_conf = get_optional_number(s, "logit_conf");
      step.verbalized_conf = get_optional_number(s, "verbalized_conf");
      step.logprob_sum = get_optional_number(s, "logprob_sum");
      if (auto it = s.find("raw_output"); it != s.end() && !it->is_null()) {
        if (!it->is_string()) throw FieldError{"field \"raw_output\" must be a string"};
        step.raw_output = it->get<std::string>();
      }
      step.extra = extras(s, {"t", "guess", "correct", "logit_conf", "verbalized_conf",
                              "logprob_sum", "raw_output"});
      tr.steps.push_back(std::move(step));
    }
    tr.extra = extras(obj, {"qid", "model_id", "steps"});
    out.push_back(std::move(tr));
  });
  return out;
}

std::vector<BuzzRecord> parse_buzzes(std::istream& in) {
  std::vector<BuzzRecord> out;
  for_each_record(in, [&](const json& obj, int) {
    BuzzRecord b;
    b.qid = get_string(obj, "qid");
    b.team_id = get_string(obj, "team_id");
    b.match_id = get_string(obj, "match_id");
    b.t = get_int(obj, "t");
    b.position_frac = get_number(field(obj, "position_frac"), "position_frac");
    b.correct = get_bool(obj, "correct");
    if (auto it = obj.find("team_kind"); it != obj.end() && !it->is_null()) {
      const std::string kind = it->is_string() ? it->get<std::string>() : std::string();
      if (kind == "human") {
        b.team_kind = TeamKind::human;
      } else if (kind == "model") {
        b.team_kind = TeamKind::model;
      } else {
        throw FieldError{"field \"team_kind\" must be \"human\" or \"model\""};
      }
    }
    b.extra = extras(obj, {"qid", "team_id", "match_id", "t", "position_frac", "correct", "team_kind"});
    out.push_back(std::move(b));
  });
  return out;
}

std::vector<SurveyResponse> parse_surveys(std::istream& in) {
  std::vector<SurveyResponse> out;
  for_each_record(in, [&](const json& obj, int) {
    SurveyResponse s;
    s.player_id = get_string(obj, "player_id");
    s.qid = get_string(obj, "qid");
    s.t = get_int(obj, "t");
    s.guess = get_string(obj, "guess");
    s.correct = get_bool(obj, "correct");
    s.would_buzz = get_bool(obj, "would_buzz");
    s.extra = extras(obj, {"player_id", "qid", "t", "guess", "correct", "would_buzz"});
    out.push_back(std::move(s));
  });
  return out;
}

OverrideTable parse_overrides(std::istream& in) {
  OverrideTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    // qid,guess,correct; the guess may contain commas, so split on the first
    // and last separator.
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    if (first == std::string::npos || first == last) {
      throw Error(ErrorKind::MalformedLine,
                  "overrides line " + std::to_string(line_no) + ": expected qid,guess,correct");
    }
    std::string qid = trim(line.substr(0, first));
    std::string guess = line.substr(first + 1, last - first - 1);
    std::string verdict = trim(line.substr(last + 1));
    for (auto& ch : verdict) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (line_no == 1 && qid == "qid" && verdict == "correct") continue;  // header
    if (guess.size() >= 2 && guess.front() == '"' && guess.back() == '"') {
      guess = guess.substr(1, guess.size() - 2);
      std::string unescaped;
      for (std::size_t i = 0; i < guess.size(); ++i) {
        unescaped += guess[i];
        if (guess[i] == '"' && i + 1 < guess.size() && guess[i + 1] == '"') ++i;
      }
      guess = std::move(unescaped);
    }
    if (verdict != "true" && verdict != "false") {
      throw Error(ErrorKind::MalformedLine, "overrides line " + std::to_string(line_no) +
                                                ": correct must be true or false");
    }
    table.set(qid, guess, verdict == "true");
  }
  return table;
}

std::vector<Question> parse_questions(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_questions(in);
}
std::vector<GuessTrace> parse_traces(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_traces(in);
}
std::vector<BuzzRecord> parse_buzzes(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_buzzes(in);
}
std::vector<SurveyResponse> parse_surveys(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_surveys(in);
}
OverrideTable parse_overrides(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_overrides(in);
}

json to_json(const Question& q) {
  json answer = {{"canonical", q.answer.canonical},
                 {"accept", q.answer.accept_aliases},
                 {"prompt", q.answer.prompt_aliases}};
  json obj = {{"qid", q.qid},
              {"category", std::string(to_string(q.category))},
              {"clues", q.clues},
              {"answer", std::move(answer)}};
  merge_extras(obj, q.extra);
  return obj;
}

json to_json(const GuessTrace& tr) {
  json steps = json::array();
  for (const auto& s : tr.steps) {
    json step = {{"t", s.t}, {"guess", s.guess}};
    if (s.correct != Correctness::unresolved) step["correct"] = s.correct == Correctness::correct;
    if (s.logit_conf) step["logit_conf"] = *s.logit_conf;
    if (s.verbalized_conf) step["verbalized_conf"] = *s.verbalized_conf;
    if (s.logprob_sum) step["logprob_sum"] = *s.logprob_sum;
    if (s.raw_output) step["raw_output"] = *s.raw_output;
    merge_extras(step, s.extra);
    steps.push_back(std::move(step));
  }
  json obj = {{"qid", tr.qid}, {"model_id", tr.model_id}, {"steps", std::move(steps)}};
  merge_extras(obj, tr.extra);
  return obj;
}

json to_json(const BuzzRecord& b) {
  json obj = {{"qid", b.qid},           {"team_id", b.team_id},
              {"match_id", b.match_id}, {"t", b.t},
              {"position_frac", b.position_frac}, {"correct", b.correct}};
  if (b.team_kind == TeamKind::model) obj["team_kind"] = "model";
  merge_extras(obj, b.extra);
  return obj;
}

json to_json(const SurveyResponse& s) {
  json obj = {{"player_id", s.player_id}, {"qid", s.qid},         {"t", s.t},
              {"guess", s.guess},         {"correct", s.correct}, {"would_buzz", s.would_buzz}};
  merge_extras(obj, s.extra);
  return obj;
}

const Question* DatasetBundle::find_question(std::string_view qid) const {
  for (const auto& q : questions) {
    if (q.qid == qid) return &q;
  }
  return nullptr;
}

ValidationReport DatasetBundle::validate() const {
  return validate_dataset(questions, traces, buzzes, surveys);
}

int resolve_correctness(DatasetBundle& bundle) {
  std::map<std::string, const Question*> by_qid;
  for (const auto& q : bundle.questions) by_qid.emplace(q.qid, &q);
  int changed = 0;
  for (auto& tr : bundle.traces) {
    auto it = by_qid.find(tr.qid);
    if (it == by_qid.end()) continue;
    for (auto& step : tr.steps) {
      Correctness next = step.correct;
      if (auto judged = bundle.overrides.lookup(tr.qid, step.guess)) {
        next = *judged ? Correctness::correct : Correctness::incorrect;
      } else if (step.correct == Correctness::unresolved) {
        next = match_answer(step.guess, it->second->answer, bundle.config.prompt_policy);
      }
      if (next != step.correct) {
        step.correct = next;
        ++changed;
      }
    }
  }
  return changed;
}

int extract_missing_verbalized(DatasetBundle& bundle) {
  int filled = 0;
  for (auto& tr : bundle.traces) {
    for (auto& step : tr.steps) {
      if (step.verbalized_conf || !step.raw_output) continue;
      if (auto v = extract_verbalized_confidence(*step.raw_output)) {
        step.verbalized_conf = v;
        ++filled;
      }
    }
  }
  return filled;
}

}  // namespace buzzcal
