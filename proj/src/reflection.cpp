#include "erl/reflection.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

#include "erl/errors.hpp"

namespace erl {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

enum class Section { none, analysis, guideline, trigger, action, rationale };

struct Marker {
  const char* word;
  Section section;
};

constexpr std::array<Marker, 5> kMarkers{{{"analysis", Section::analysis},
                                          {"learned guideline", Section::guideline},
                                          {"trigger", Section::trigger},
                                          {"action", Section::action},
                                          {"rationale", Section::rationale}}};

// Recognises "  2. **Learned Guideline:** text", "- *Trigger:* text", "Action: text".
// Returns the section and the text that follows the colon.
std::optional<std::pair<Section, std::string>> match_marker(std::string_view line) {
  std::size_t i = 0;
  auto skip = [&](std::string_view chars) {
    while (i < line.size() && chars.find(line[i]) != std::string_view::npos) ++i;
  };
  skip(" \t-*_#>");
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  skip(".) \t*_");
  const std::string rest = lower(line.substr(i));
  for (const Marker& m : kMarkers) {
    const std::string_view word = m.word;
    if (rest.rfind(word, 0) != 0) continue;
    std::size_t j = i + word.size();
    while (j < line.size() && (line[j] == '*' || line[j] == '_' || line[j] == ' ')) ++j;
    if (j >= line.size() || line[j] != ':') continue;
    ++j;
    while (j < line.size() && (line[j] == '*' || line[j] == '_')) ++j;
    return std::make_pair(m.section, trim(line.substr(j)));
  }
  return std::nullopt;
}

std::string validation_text(const Experience& e) {
  std::string text(to_string(e.outcome));
  if (e.outcome_source == OutcomeSource::self_assessed) text += " (self-assessed, no environment reward)";
  return text;
}

}  // namespace

std::string build_reflection_prompt(const PromptTemplate& generation_template, std::string_view task,
                                    std::string_view trajectory_text, std::string_view validation_text) {
  if (is_blank(task)) throw PreconditionError("reflection prompt needs a task description");
  if (is_blank(trajectory_text)) throw PreconditionError("reflection prompt needs a trajectory");
  if (is_blank(validation_text)) throw PreconditionError("reflection prompt needs an outcome");
  return generation_template.render({{"task_info", std::string(task)},
                                     {"validation_info", std::string(validation_text)},
                                     {"trajectory_text", std::string(trajectory_text)}});
}

Heuristic parse_heuristic(std::string_view text, std::string scenario_id, std::string task, Outcome outcome,
                          OutcomeSource outcome_source, Timestamp created_at) {
  if (is_blank(text)) throw EmptyReflection();

  std::map<Section, std::vector<std::string>> sections;
  Section current = Section::none;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto m = match_marker(line)) {
      current = m->first;
      // Only the first occurrence of a marker opens its section.
      if (sections.contains(current)) {
        sections[current].push_back(line);
        continue;
      }
      sections[current];
      if (!m->second.empty()) sections[current].push_back(m->second);
      continue;
    }
    if (current != Section::none) sections[current].push_back(line);
  }

  auto joined = [&](Section s) {
    std::string out;
    auto it = sections.find(s);
    if (it == sections.end()) return out;
    for (const std::string& l : it->second) {
      if (!out.empty()) out += '\n';
      out += l;
    }
    return trim(out);
  };

  Heuristic h;
  h.scenario_id = std::move(scenario_id);
  h.task = std::move(task);
  h.outcome = outcome;
  h.outcome_source = outcome_source;
  h.analysis = joined(Section::analysis);
  h.guideline_trigger = joined(Section::trigger);
  h.guideline_action = joined(Section::action);
  if (h.guideline_trigger.empty() && h.guideline_action.empty()) {
    h.guideline_action = joined(Section::guideline);
  }
  h.raw_text = std::string(text);
  h.created_at = created_at;
  return h;
}

std::string build_self_assessment_prompt(const PromptTemplate& assessment_template, std::string_view task,
                                         std::string_view trajectory_text) {
  if (is_blank(task)) throw PreconditionError("self-assessment prompt needs a task description");
  return assessment_template.render(
      {{"task_info", std::string(task)}, {"trajectory_text", std::string(trajectory_text)}});
}

Outcome parse_verdict(std::string_view response) {
  std::optional<Outcome> verdict;
  std::istringstream in{std::string(response)};
  std::string line;
  while (std::getline(in, line)) {
    std::string l = lower(trim(line));
    std::erase(l, '*');
    const auto pos = l.find("verdict:");
    if (pos == std::string::npos) continue;
    const std::string value = trim(std::string_view(l).substr(pos + 8));
    if (value.rfind("success", 0) == 0) verdict = Outcome::success;
    else if (value.rfind("failure", 0) == 0) verdict = Outcome::failure;
  }
  if (verdict) return *verdict;
  std::string whole = lower(trim(response));
  while (!whole.empty() && (whole.back() == '.' || whole.back() == '!')) whole.pop_back();
  if (whole == "success") return Outcome::success;
  if (whole == "failure") return Outcome::failure;
  throw UnparseableVerdict("no verdict in self-assessment: " + std::string(response.substr(0, 120)));
}

Outcome infer_outcome(std::string_view scenario_id, std::string_view task, const Trajectory& trajectory,
                      Gateway& gateway, const PromptTemplates& templates, const ReflectionOptions& options) {
  const std::string prompt = build_self_assessment_prompt(
      templates.self_assessment, task, serialize_trajectory(trajectory, options.observation_budget));
  const std::vector<ChatMessage> messages{ChatMessage::user(prompt)};
  ChatParams params;
  params.step = StepLabel::self_assessment;
  params.session = "assess/" + std::string(scenario_id);
  return parse_verdict(gateway.chat(messages, {}, params).message.content);
}

Heuristic reflect(const Experience& experience, Gateway& gateway, const PromptTemplates& templates,
                  const ReflectionOptions& options) {
  if (experience.trajectory.steps.empty()) throw PreconditionError("experience has an empty trajectory");
  const std::string prompt =
      build_reflection_prompt(templates.heuristic_generation, experience.task,
                              serialize_trajectory(experience.trajectory, options.observation_budget),
                              validation_text(experience));
  const std::vector<ChatMessage> messages{ChatMessage::user(prompt)};
  ChatParams params;
  params.step = StepLabel::generation;
  params.session = "reflect/" + experience.scenario_id;
  const ChatResult result = gateway.chat(messages, {}, params);

  Heuristic h = parse_heuristic(result.message.content, experience.scenario_id, experience.task,
                                experience.outcome, experience.outcome_source, options.created_at);
  // Without an Analysis marker the whole reflection is the analysis.
  if (h.analysis.empty()) h.analysis = trim(h.raw_text);
  return h;
}

}  // namespace erl
