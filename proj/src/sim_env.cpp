#include "erl/sim_env.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <tuple>

#include "erl/errors.hpp"

namespace erl {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

// --- schema helpers -----------------------------------------------------------

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  if (!j.contains(key)) throw SchemaError(path + "." + key, "missing");
  return j[key];
}

std::string str_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::string datetime_field(const json& j, const std::string& key, const std::string& path) {
  std::string v = str_field(j, key, path);
  if (!is_datetime(v)) throw SchemaError(path + "." + key, "expected YYYY-MM-DD HH:MM:SS");
  return v;
}

std::vector<std::string> str_list_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      throw SchemaError(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

const json& array_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected an array");
  return v;
}

// --- tool argument helpers ------------------------------------------------------

struct ArgumentError {
  std::string message;
};

std::string arg_str(const json& args, const char* key) {
  if (!args.is_object() || !args.contains(key)) throw ArgumentError{std::string("missing argument '") + key + "'"};
  if (!args[key].is_string()) throw ArgumentError{std::string("argument '") + key + "' must be a string"};
  return args[key].get<std::string>();
}

std::string arg_datetime(const json& args, const char* key) {
  std::string v = arg_str(args, key);
  if (!is_datetime(v)) {
    throw ArgumentError{std::string("argument '") + key + "' must look like YYYY-MM-DD HH:MM:SS"};
  }
  return v;
}

std::vector<std::string> arg_str_list(const json& args, const char* key, bool required) {
  if (!args.is_object() || !args.contains(key) || args[key].is_null()) {
    if (required) throw ArgumentError{std::string("missing argument '") + key + "'"};
    return {};
  }
  const json& v = args[key];
  if (!v.is_array()) throw ArgumentError{std::string("argument '") + key + "' must be a list of strings"};
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string()) throw ArgumentError{std::string("argument '") + key + "' must be a list of strings"};
    out.push_back(item.get<std::string>());
  }
  return out;
}

bool valid_email(std::string_view address) {
  const auto at = address.find('@');
  if (at == std::string_view::npos || at == 0 || address.find('@', at + 1) != std::string_view::npos) {
    return false;
  }
  if (address.find_first_of(" \t") != std::string_view::npos) return false;
  const std::string_view domain = address.substr(at + 1);
  const auto dot = domain.find('.');
  return !domain.empty() && dot != std::string_view::npos && dot != 0 && domain.back() != '.';
}

json event_json(const CalendarEvent& e) {
  return json{{"event_id", e.event_id}, {"title", e.title},         {"start_datetime", e.start},
              {"end_datetime", e.end},  {"attendees", e.attendees}};
}

json contact_json(const Contact& c) {
  return json{{"name", c.name}, {"email", c.email}, {"age", c.age}, {"city", c.city}};
}

json email_json(const EmailMessage& m) {
  return json{{"message_id", m.message_id}, {"recipients", m.to}, {"subject", m.subject},
              {"content", m.body},          {"sent_at", m.sent_at}};
}

std::vector<CalendarEvent> sorted_events(std::vector<CalendarEvent> events) {
  std::sort(events.begin(), events.end(), [](const CalendarEvent& a, const CalendarEvent& b) {
    return std::tie(a.start, a.event_id) < std::tie(b.start, b.event_id);
  });
  return events;
}

ToolResult ok(json j) { return {ToolStatus::ok, j.dump()}; }
ToolResult domain_error(std::string msg) { return {ToolStatus::domain_error, std::move(msg)}; }

ToolResult run_tool(WorldState& state, std::string_view tool, const json& args) {
  Universe& u = state.data();

  if (tool == "Calendar__get_calendar_events_from_to") {
    const std::string from = arg_datetime(args, "start_datetime");
    const std::string to = arg_datetime(args, "end_datetime");
    json out = json::array();
    for (const CalendarEvent& e : sorted_events(u.calendar_events)) {
      if (e.start < to && e.end > from) out.push_back(event_json(e));
    }
    return ok(out);
  }
  if (tool == "Calendar__search_events") {
    const std::string query = arg_str(args, "query");
    json out = json::array();
    for (const CalendarEvent& e : sorted_events(u.calendar_events)) {
      if (icontains(e.title, query)) out.push_back(event_json(e));
    }
    return ok(out);
  }
  if (tool == "Calendar__get_calendar_event") {
    const std::string id = arg_str(args, "event_id");
    for (const CalendarEvent& e : u.calendar_events) {
      if (e.event_id == id) return ok(event_json(e));
    }
    return domain_error("Event not found: " + id);
  }
  if (tool == "Calendar__add_calendar_event") {
    CalendarEvent e;
    e.title = arg_str(args, "title");
    e.start = arg_datetime(args, "start_datetime");
    e.end = arg_datetime(args, "end_datetime");
    e.attendees = arg_str_list(args, "attendees", false);
    if (!(e.start < e.end)) return domain_error("Event must end after it starts");
    e.event_id = state.next_event_id();
    u.calendar_events.push_back(e);
    return ok(json{{"event_id", e.event_id}});
  }
  if (tool == "Calendar__delete_calendar_event") {
    const std::string id = arg_str(args, "event_id");
    auto it = std::find_if(u.calendar_events.begin(), u.calendar_events.end(),
                           [&](const CalendarEvent& e) { return e.event_id == id; });
    if (it == u.calendar_events.end()) return domain_error("Event not found: " + id);
    u.calendar_events.erase(it);
    return ok(json{{"deleted", id}});
  }
  if (tool == "Contacts__get_contact") {
    const std::string name = arg_str(args, "name");
    for (const Contact& c : u.contacts) {
      if (lower(c.name) == lower(name)) return ok(contact_json(c));
    }
    return domain_error("Contact not found: " + name);
  }
  if (tool == "Contacts__search_contacts") {
    const std::string query = arg_str(args, "query");
    json out = json::array();
    for (const Contact& c : u.contacts) {
      if (icontains(c.name, query) || icontains(c.email, query) || icontains(c.city, query)) {
        out.push_back(contact_json(c));
      }
    }
    return ok(out);
  }
  if (tool == "Contacts__list_contacts") {
    json out = json::array();
    for (const Contact& c : u.contacts) out.push_back(contact_json(c));
    return ok(out);
  }
  if (tool == "Emails__send_email") {
    EmailMessage m;
    m.to = arg_str_list(args, "recipients", true);
    m.subject = arg_str(args, "subject");
    m.body = arg_str(args, "content");
    if (m.to.empty()) return domain_error("No recipients given");
    for (const std::string& r : m.to) {
      if (!valid_email(r)) return domain_error("Invalid email address: " + r);
    }
    m.message_id = state.next_message_id();
    m.sent_at = u.now;
    u.emails.push_back(m);
    return ok(json{{"message_id", m.message_id}});
  }
  if (tool == "Emails__list_emails") {
    json out = json::array();
    for (const EmailMessage& m : u.emails) out.push_back(email_json(m));
    return ok(out);
  }
  if (tool == "Emails__search_emails") {
    const std::string query = arg_str(args, "query");
    json out = json::array();
    for (const EmailMessage& m : u.emails) {
      if (icontains(m.subject, query) || icontains(m.body, query)) out.push_back(email_json(m));
    }
    return ok(out);
  }
  if (tool == "System__get_current_time") {
    return ok(json{{"current_time", u.now}});
  }
  return {ToolStatus::unknown_tool, "Unknown tool: " + std::string(tool)};
}

json object_schema(json properties, std::vector<std::string> required) {
  return json{{"type", "object"}, {"properties", std::move(properties)}, {"required", std::move(required)}};
}

const json kString{{"type", "string"}};
const json kDatetime{{"type", "string"}, {"description", "YYYY-MM-DD HH:MM:SS"}};
const json kStringList{{"type", "array"}, {"items", {{"type", "string"}}}};

}  // namespace

bool is_datetime(std::string_view t) {
  if (t.size() != 19) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    switch (i) {
      case 4:
      case 7:
        if (c != '-') return false;
        break;
      case 10:
        if (c != ' ') return false;
        break;
      case 13:
      case 16:
        if (c != ':') return false;
        break;
      default:
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
  }
  return true;
}

Universe universe_from_json(const json& j) {
  const std::string root = "universe";
  Universe u;
  u.universe_id = str_field(j, "universe_id", root);
  u.now = datetime_field(j, "now", root);
  std::set<std::string> seen;

  const json& contacts = array_field(j, "contacts", root);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const std::string p = root + ".contacts[" + std::to_string(i) + "]";
    Contact c;
    c.name = str_field(contacts[i], "name", p);
    c.email = str_field(contacts[i], "email", p);
    const json& age = field(contacts[i], "age", p);
    if (!age.is_number_integer()) throw SchemaError(p + ".age", "expected an integer");
    c.age = age.get<int>();
    c.city = str_field(contacts[i], "city", p);
    if (!valid_email(c.email)) throw SchemaError(p + ".email", "not a valid email address");
    u.contacts.push_back(std::move(c));
  }

  const json& events = array_field(j, "calendar_events", root);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string p = root + ".calendar_events[" + std::to_string(i) + "]";
    CalendarEvent e;
    e.event_id = str_field(events[i], "event_id", p);
    e.title = str_field(events[i], "title", p);
    e.start = datetime_field(events[i], "start", p);
    e.end = datetime_field(events[i], "end", p);
    e.attendees = str_list_field(events[i], "attendees", p);
    if (!seen.insert("event:" + e.event_id).second) throw SchemaError(p + ".event_id", "duplicate event_id " + e.event_id);
    u.calendar_events.push_back(std::move(e));
  }

  const json& emails = array_field(j, "emails", root);
  for (std::size_t i = 0; i < emails.size(); ++i) {
    const std::string p = root + ".emails[" + std::to_string(i) + "]";
    EmailMessage m;
    m.message_id = str_field(emails[i], "message_id", p);
    m.to = str_list_field(emails[i], "to", p);
    m.subject = str_field(emails[i], "subject", p);
    m.body = str_field(emails[i], "body", p);
    m.sent_at = datetime_field(emails[i], "sent_at", p);
    if (!seen.insert("message:" + m.message_id).second) {
      throw SchemaError(p + ".message_id", "duplicate message_id " + m.message_id);
    }
    u.emails.push_back(std::move(m));
  }
  return u;
}

Universe load_universe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError(path.string(), "not valid JSON");
  return universe_from_json(j);
}

json to_json(const Universe& u) {
  json contacts = json::array();
  for (const Contact& c : u.contacts) contacts.push_back(contact_json(c));
  json events = json::array();
  for (const CalendarEvent& e : u.calendar_events) {
    events.push_back({{"event_id", e.event_id}, {"title", e.title}, {"start", e.start}, {"end", e.end},
                      {"attendees", e.attendees}});
  }
  json emails = json::array();
  for (const EmailMessage& m : u.emails) {
    emails.push_back({{"message_id", m.message_id}, {"to", m.to}, {"subject", m.subject}, {"body", m.body},
                      {"sent_at", m.sent_at}});
  }
  return json{{"universe_id", u.universe_id}, {"now", u.now},       {"contacts", contacts},
              {"calendar_events", events},    {"emails", emails}};
}

std::vector<std::string> disjointness_violations(std::span<const Universe> universes) {
  std::map<std::string, std::string> owner;
  std::vector<std::string> out;
  auto claim = [&](const std::string& key, const std::string& uid) {
    auto [it, inserted] = owner.emplace(key, uid);
    if (!inserted && it->second != uid) out.push_back(key + " shared by " + it->second + " and " + uid);
  };
  for (const Universe& u : universes) {
    for (const Contact& c : u.contacts) claim("email " + lower(c.email), u.universe_id);
    for (const CalendarEvent& e : u.calendar_events) claim("event_id " + e.event_id, u.universe_id);
    for (const EmailMessage& m : u.emails) claim("message_id " + m.message_id, u.universe_id);
  }
  return out;
}

std::string_view to_string(Split s) { return s == Split::execution ? "execution" : "search"; }

Check check_from_json(const json& j, const std::string& path) {
  const std::string kind = str_field(j, "kind", path);
  Check c;
  c.parameters = j.contains("parameters") ? j["parameters"] : json::object();
  const std::string pp = path + ".parameters";
  if (!c.parameters.is_object()) throw SchemaError(pp, "expected an object");
  auto optional_str = [&](const char* key) {
    if (c.parameters.contains(key) && !c.parameters[key].is_string()) {
      throw SchemaError(pp + "." + key, "expected a string");
    }
  };
  if (kind == "event_exists") {
    c.kind = CheckKind::event_exists;
    str_field(c.parameters, "title", pp);
    if (c.parameters.contains("start")) datetime_field(c.parameters, "start", pp);
    if (c.parameters.contains("end")) datetime_field(c.parameters, "end", pp);
    if (c.parameters.contains("attendees")) str_list_field(c.parameters, "attendees", pp);
  } else if (kind == "event_absent") {
    c.kind = CheckKind::event_absent;
    optional_str("event_id");
    optional_str("title");
    if (c.parameters.contains("start")) datetime_field(c.parameters, "start", pp);
    if (!c.parameters.contains("event_id") && !c.parameters.contains("title")) {
      throw SchemaError(pp, "event_absent needs event_id or title");
    }
  } else if (kind == "email_sent") {
    c.kind = CheckKind::email_sent;
    str_field(c.parameters, "recipient", pp);
    optional_str("subject_contains");
    optional_str("body_contains");
  } else if (kind == "answer_contains") {
    c.kind = CheckKind::answer_contains;
    str_field(c.parameters, "substring", pp);
  } else {
    throw SchemaError(path + ".kind", "unknown check kind '" + kind + "'");
  }
  return c;
}

Scenario scenario_from_json(const json& j, const std::string& path) {
  Scenario s;
  s.scenario_id = str_field(j, "scenario_id", path);
  s.universe_id = str_field(j, "universe_id", path);
  s.task = str_field(j, "task", path);
  const std::string split = str_field(j, "split", path);
  if (split == "execution") {
    s.split = Split::execution;
  } else if (split == "search") {
    s.split = Split::search;
  } else {
    throw SchemaError(path + ".split", "expected execution or search");
  }
  const json& checks = array_field(j, "checks", path);
  if (checks.empty()) throw SchemaError(path + ".checks", "at least one check is required");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    s.checks.push_back(check_from_json(checks[i], path + ".checks[" + std::to_string(i) + "]"));
  }
  return s;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError(path.string(), "not valid JSON");
  const json& list = array_field(j, "scenarios", path.filename().string());
  std::vector<Scenario> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = "scenarios[" + std::to_string(i) + "]";
    Scenario s = scenario_from_json(list[i], p);
    if (!ids.insert(s.scenario_id).second) throw SchemaError(p + ".scenario_id", "duplicate " + s.scenario_id);
    out.push_back(std::move(s));
  }
  return out;
}

WorldState::WorldState(const Universe& base) : data_(base), first_new_email_(base.emails.size()) {}

std::string WorldState::next_event_id() {
  return data_.universe_id + "-ev-new-" + std::to_string(next_event_++);
}

std::string WorldState::next_message_id() {
  return data_.universe_id + "-msg-new-" + std::to_string(next_message_++);
}

std::uint64_t WorldState::hash() const {
  json j = to_json(data_);
  j["_counters"] = {first_new_email_, next_event_, next_message_};
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : j.dump()) h = (h ^ c) * 1099511628211ull;
  return h;
}

ToolResult invoke(WorldState& state, std::string_view tool_name, const json& arguments) {
  // Work on a copy so a call that fails half-way leaves no trace.
  WorldState scratch = state;
  try {
    ToolResult r = run_tool(scratch, tool_name, arguments);
    if (r.ok()) state = std::move(scratch);
    return r;
  } catch (const ArgumentError& e) {
    return {ToolStatus::argument_error, e.message};
  }
}

const std::vector<ToolSchema>& tool_schemas() {
  static const std::vector<ToolSchema> schemas{
      {"Calendar__get_calendar_events_from_to", "List calendar events overlapping a time window.",
       object_schema({{"start_datetime", kDatetime}, {"end_datetime", kDatetime}},
                     {"start_datetime", "end_datetime"})},
      {"Calendar__search_events", "Find calendar events whose title contains the query.",
       object_schema({{"query", kString}}, {"query"})},
      {"Calendar__get_calendar_event", "Get one calendar event by id.",
       object_schema({{"event_id", kString}}, {"event_id"})},
      {"Calendar__add_calendar_event", "Create a calendar event. Returns its event_id.",
       object_schema({{"title", kString},
                      {"start_datetime", kDatetime},
                      {"end_datetime", kDatetime},
                      {"attendees", kStringList}},
                     {"title", "start_datetime", "end_datetime"})},
      {"Calendar__delete_calendar_event", "Delete a calendar event by id.",
       object_schema({{"event_id", kString}}, {"event_id"})},
      {"Contacts__get_contact", "Get a contact by exact name.", object_schema({{"name", kString}}, {"name"})},
      {"Contacts__search_contacts", "Find contacts whose name, email or city contains the query.",
       object_schema({{"query", kString}}, {"query"})},
      {"Contacts__list_contacts", "List all contacts.", object_schema(json::object(), {})},
      {"Emails__send_email", "Send an email. Recipients must be email addresses.",
       object_schema({{"recipients", kStringList}, {"subject", kString}, {"content", kString}},
                     {"recipients", "subject", "content"})},
      {"Emails__list_emails", "List all emails.", object_schema(json::object(), {})},
      {"Emails__search_emails", "Find emails whose subject or content contains the query.",
       object_schema({{"query", kString}}, {"query"})},
      {"System__get_current_time", "Get the current date and time.", object_schema(json::object(), {})},
  };
  return schemas;
}

bool check_passes(const Check& check, const WorldState& state, const std::optional<std::string>& final_answer) {
  const json& p = check.parameters;
  const Universe& u = state.data();
  auto event_matches = [&](const CalendarEvent& e) {
    if (p.contains("event_id") && e.event_id != p["event_id"].get<std::string>()) return false;
    if (p.contains("title") && lower(e.title) != lower(p["title"].get<std::string>())) return false;
    if (p.contains("start") && e.start != p["start"].get<std::string>()) return false;
    if (p.contains("end") && e.end != p["end"].get<std::string>()) return false;
    if (p.contains("attendees")) {
      std::vector<std::string> want = p["attendees"].get<std::vector<std::string>>();
      std::vector<std::string> have = e.attendees;
      std::sort(want.begin(), want.end());
      std::sort(have.begin(), have.end());
      if (want != have) return false;
    }
    return true;
  };
  switch (check.kind) {
    case CheckKind::event_exists:
      return std::any_of(u.calendar_events.begin(), u.calendar_events.end(), event_matches);
    case CheckKind::event_absent:
      return std::none_of(u.calendar_events.begin(), u.calendar_events.end(), event_matches);
    case CheckKind::email_sent: {
      const std::string recipient = lower(p["recipient"].get<std::string>());
      for (std::size_t i = state.first_new_email(); i < u.emails.size(); ++i) {
        const EmailMessage& m = u.emails[i];
        const bool to_match = std::any_of(m.to.begin(), m.to.end(),
                                          [&](const std::string& r) { return lower(r) == recipient; });
        if (!to_match) continue;
        if (p.contains("subject_contains") && !icontains(m.subject, p["subject_contains"].get<std::string>())) continue;
        if (p.contains("body_contains") && !icontains(m.body, p["body_contains"].get<std::string>())) continue;
        return true;
      }
      return false;
    }
    case CheckKind::answer_contains:
      return final_answer && icontains(*final_answer, p["substring"].get<std::string>());
  }
  return false;
}

Outcome verify(const Scenario& scenario, const WorldState& state, const std::optional<std::string>& final_answer) {
  for (const Check& c : scenario.checks) {
    if (!check_passes(c, state, final_answer)) return Outcome::failure;
  }
  return Outcome::success;
}

Environment::Environment(std::vector<Universe> universes) {
  for (Universe& u : universes) {
    const std::string id = u.universe_id;
    if (!universes_.emplace(id, std::move(u)).second) throw SchemaError(id, "duplicate universe_id");
  }
  const std::vector<Universe> all = this->universes();
  if (auto v = disjointness_violations(all); !v.empty()) throw SchemaError("universes", v.front());
}

Environment Environment::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Universe> universes;
  for (const auto& f : files) universes.push_back(load_universe(f));
  return Environment(std::move(universes));
}

const Universe& Environment::universe(const std::string& id) const {
  auto it = universes_.find(id);
  if (it == universes_.end()) throw SchemaError(id, "unknown universe");
  return it->second;
}

std::vector<Universe> Environment::universes() const {
  std::vector<Universe> out;
  for (const auto& [id, u] : universes_) out.push_back(u);
  return out;
}

}  // namespace erl
