#include "erl/heuristic_pool.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "erl/errors.hpp"

namespace erl {
namespace {

using nlohmann::json;

constexpr const char* kKeys[] = {"scenario_id",      "task",           "outcome",
                                 "outcome_source",   "analysis",       "guideline_trigger",
                                 "guideline_action", "raw_text",       "created_at"};

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

void validate(const Heuristic& h) {
  if (h.scenario_id.empty()) throw InvalidHeuristic("heuristic has an empty scenario_id");
  if (h.analysis.empty()) throw InvalidHeuristic("heuristic " + h.scenario_id + " has an empty analysis");
  if (h.raw_text.empty()) throw InvalidHeuristic("heuristic " + h.scenario_id + " has an empty raw_text");
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0;
  int h = 0, mi = 0, s = 0;
  char tail = 0;
  const std::string str(text);
  if (std::sscanf(str.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail) != 7 ||
      tail != 'Z' || str.size() != 20) {
    throw Error("bad ISO-8601 UTC timestamp '" + str + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) throw Error("bad ISO-8601 UTC timestamp '" + str + "'");
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
         std::chrono::seconds{s};
}

json to_json(const Heuristic& h) {
  return json{{"scenario_id", h.scenario_id},
              {"task", h.task},
              {"outcome", to_string(h.outcome)},
              {"outcome_source", to_string(h.outcome_source)},
              {"analysis", h.analysis},
              {"guideline_trigger", h.guideline_trigger},
              {"guideline_action", h.guideline_action},
              {"raw_text", h.raw_text},
              {"created_at", format_timestamp(h.created_at)}};
}

Heuristic heuristic_from_json(const json& j) {
  if (!j.is_object()) throw Error("record is not a JSON object");
  for (const char* key : kKeys) {
    if (!j.contains(key)) throw Error(std::string("missing key '") + key + "'");
    if (!j[key].is_string()) throw Error(std::string("key '") + key + "' is not a string");
  }
  Heuristic h;
  h.scenario_id = j["scenario_id"].get<std::string>();
  h.task = j["task"].get<std::string>();
  h.outcome = parse_outcome(j["outcome"].get<std::string>());
  h.outcome_source = parse_outcome_source(j["outcome_source"].get<std::string>());
  h.analysis = j["analysis"].get<std::string>();
  h.guideline_trigger = j["guideline_trigger"].get<std::string>();
  h.guideline_action = j["guideline_action"].get<std::string>();
  h.raw_text = j["raw_text"].get<std::string>();
  h.created_at = parse_timestamp(j["created_at"].get<std::string>());
  return h;
}

std::string_view to_string(OutcomeFilter f) {
  switch (f) {
    case OutcomeFilter::all: return "all";
    case OutcomeFilter::failures_only: return "failures_only";
    case OutcomeFilter::successes_only: return "successes_only";
  }
  return "all";
}

OutcomeFilter parse_outcome_filter(std::string_view text) {
  if (text == "all") return OutcomeFilter::all;
  if (text == "failures_only" || text == "failures") return OutcomeFilter::failures_only;
  if (text == "successes_only" || text == "successes") return OutcomeFilter::successes_only;
  throw ConfigError("unknown outcome filter '" + std::string(text) + "'");
}

void Pool::append(Heuristic h) {
  validate(h);
  if (ids_.contains(h.scenario_id)) throw DuplicateScenarioId(h.scenario_id);
  ids_.insert(h.scenario_id);
  entries_.push_back(std::move(h));
}

Pool Pool::filtered(OutcomeFilter f) const {
  Pool out;
  out.origin_ = origin_;
  for (const Heuristic& h : entries_) {
    const bool keep = f == OutcomeFilter::all ||
                      (f == OutcomeFilter::failures_only && h.outcome == Outcome::failure) ||
                      (f == OutcomeFilter::successes_only && h.outcome == Outcome::success);
    if (keep) out.append(h);
  }
  return out;
}

bool Pool::contains(std::string_view scenario_id) const {
  return ids_.contains(std::string(scenario_id));
}

const Heuristic* Pool::find(std::string_view scenario_id) const {
  for (const Heuristic& h : entries_) {
    if (h.scenario_id == scenario_id) return &h;
  }
  return nullptr;
}

void Pool::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    for (const Heuristic& h : entries_) {
      out << to_json(h).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

Pool Pool::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  Pool pool;
  pool.origin_ = path;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    Heuristic h;
    try {
      h = heuristic_from_json(json::parse(line));
      validate(h);
    } catch (const json::exception& e) {
      throw FormatError(line_no, e.what());
    } catch (const Error& e) {
      throw FormatError(line_no, e.what());
    }
    if (pool.contains(h.scenario_id)) {
      throw FormatError(line_no, "duplicate scenario_id '" + h.scenario_id + "'");
    }
    pool.append(std::move(h));
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  return pool;
}

void append_record(const std::filesystem::path& path, const Heuristic& h) {
  validate(h);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to " + path.string());
  out << to_json(h).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  if (!out.flush()) throw IoError("append failed for " + path.string());
}

PoolStore::PoolStore(Pool initial, std::optional<std::filesystem::path> file)
    : current_(std::make_shared<const Pool>(std::move(initial))), file_(std::move(file)) {}

PoolSnapshot PoolStore::snapshot() const {
  std::lock_guard lock(mu_);
  return current_;
}

void PoolStore::append(Heuristic h) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<Pool>(*current_);
  next->append(h);
  if (file_) append_record(*file_, h);
  current_ = std::move(next);
}

}  // namespace erl
