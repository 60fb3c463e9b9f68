#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "erl/llm_gateway.hpp"
#include "erl/outcome.hpp"

namespace erl {

// Datetimes are "YYYY-MM-DD HH:MM:SS" strings, so lexical order is time order.
bool is_datetime(std::string_view text);

struct Contact {
  std::string name;
  std::string email;
  int age = 0;
  std::string city;

  bool operator==(const Contact&) const = default;
};

struct CalendarEvent {
  std::string event_id;
  std::string title;
  std::string start;
  std::string end;
  std::vector<std::string> attendees;

  bool operator==(const CalendarEvent&) const = default;
};

struct EmailMessage {
  std::string message_id;
  std::vector<std::string> to;
  std::string subject;
  std::string body;
  std::string sent_at;

  bool operator==(const EmailMessage&) const = default;
};

// One isolated data partition. Every universe exposes the same tools.
struct Universe {
  std::string universe_id;
  std::string now;  // fixed virtual clock
  std::vector<Contact> contacts;
  std::vector<CalendarEvent> calendar_events;
  std::vector<EmailMessage> emails;

  bool operator==(const Universe&) const = default;
};

// Both throw SchemaError naming the offending field path.
Universe universe_from_json(const nlohmann::json& j);
Universe load_universe(const std::filesystem::path& path);
nlohmann::json to_json(const Universe& u);

// Descriptions of every id or email shared between two universes; empty when disjoint.
std::vector<std::string> disjointness_violations(std::span<const Universe> universes);

enum class CheckKind { event_exists, event_absent, email_sent, answer_contains };

struct Check {
  CheckKind kind = CheckKind::answer_contains;
  nlohmann::json parameters = nlohmann::json::object();
};

enum class Split { execution, search };

std::string_view to_string(Split s);

struct Scenario {
  std::string scenario_id;
  std::string universe_id;
  std::string task;
  Split split = Split::execution;
  std::vector<Check> checks;
};

Check check_from_json(const nlohmann::json& j, const std::string& path);
Scenario scenario_from_json(const nlohmann::json& j, const std::string& path = "scenario");
// A JSON file holding {"scenarios": [...]}.
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

// Mutable per-episode copy of a universe.
class WorldState {
 public:
  explicit WorldState(const Universe& base);

  const Universe& data() const { return data_; }
  Universe& data() { return data_; }
  // Emails at or after this index were sent during the episode.
  std::size_t first_new_email() const { return first_new_email_; }
  std::string next_event_id();
  std::string next_message_id();

  // FNV-1a over a canonical serialization, for determinism checks.
  std::uint64_t hash() const;

  bool operator==(const WorldState&) const = default;

 private:
  Universe data_;
  std::size_t first_new_email_ = 0;
  int next_event_ = 1;
  int next_message_ = 1;
};

enum class ToolStatus { ok, unknown_tool, argument_error, domain_error };

struct ToolResult {
  ToolStatus status = ToolStatus::ok;
  std::string text;  // compact JSON on success, error message otherwise

  bool ok() const { return status == ToolStatus::ok; }
  // What the agent sees: the JSON text, or "Error: <message>".
  std::string observation() const { return ok() ? text : "Error: " + text; }
};

// Deterministic. Failed calls leave the state untouched.
ToolResult invoke(WorldState& state, std::string_view tool_name, const nlohmann::json& arguments);

const std::vector<ToolSchema>& tool_schemas();

bool check_passes(const Check& check, const WorldState& state, const std::optional<std::string>& final_answer);

// Success iff every check passes. Never mutates.
Outcome verify(const Scenario& scenario, const WorldState& state, const std::optional<std::string>& final_answer);

// All universes of a fixture directory, keyed by id.
class Environment {
 public:
  Environment() = default;
  explicit Environment(std::vector<Universe> universes);

  // Loads every *.json in `dir`; throws SchemaError on duplicate ids or overlap.
  static Environment load_dir(const std::filesystem::path& dir);

  const Universe& universe(const std::string& id) const;
  bool has_universe(const std::string& id) const { return universes_.contains(id); }
  std::vector<Universe> universes() const;

 private:
  std::map<std::string, Universe> universes_;
};

}  // namespace erl
