#include "erl/trajectory.hpp"

#include "erl/errors.hpp"

namespace erl {

std::string truncate_observation(std::string_view observation, std::size_t budget) {
  if (observation.size() <= budget) return std::string(observation);
  const std::size_t elided = observation.size() - budget;
  std::string out = "[... " + std::to_string(elided) + " characters elided ...]";
  out += observation.substr(elided);
  return out;
}

std::string serialize_trajectory(const Trajectory& trajectory, std::size_t observation_budget) {
  std::string out;
  for (std::size_t i = 0; i < trajectory.steps.size(); ++i) {
    const Step& s = trajectory.steps[i];
    if (i > 0) out += '\n';
    out += "Step " + std::to_string(i + 1) + "\n";
    out += "Thought: " + s.thought + "\n";
    if (s.action) {
      out += "Action: " + s.action->tool + "(" + s.action->arguments.dump() + ")\n";
    }
    if (s.observation) {
      out += "Observation: " + truncate_observation(*s.observation, observation_budget) + "\n";
    }
  }
  if (trajectory.final_answer) {
    if (!out.empty()) out += '\n';
    out += "Final answer: " + *trajectory.final_answer + "\n";
  } else {
    if (!out.empty()) out += '\n';
    out += "Final answer: (none, the episode ended without one)\n";
  }
  return out;
}

nlohmann::json to_json(const Trajectory& trajectory) {
  nlohmann::json steps = nlohmann::json::array();
  for (const Step& s : trajectory.steps) {
    nlohmann::json js{{"thought", s.thought}};
    if (s.action) js["action"] = {{"tool", s.action->tool}, {"arguments", s.action->arguments}};
    if (s.observation) js["observation"] = *s.observation;
    steps.push_back(std::move(js));
  }
  nlohmann::json j{{"steps", std::move(steps)}, {"turn_count", trajectory.turn_count}};
  j["final_answer"] = trajectory.final_answer ? nlohmann::json(*trajectory.final_answer) : nlohmann::json();
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    Trajectory t;
    for (const auto& js : j.at("steps")) {
      Step s;
      s.thought = js.at("thought").get<std::string>();
      if (js.contains("action")) {
        s.action = ToolAction{js["action"].at("tool").get<std::string>(),
                              js["action"].value("arguments", nlohmann::json::object())};
      }
      if (js.contains("observation")) s.observation = js["observation"].get<std::string>();
      t.steps.push_back(std::move(s));
    }
    if (j.contains("final_answer") && !j["final_answer"].is_null()) {
      t.final_answer = j["final_answer"].get<std::string>();
    }
    t.turn_count = j.value("turn_count", 0);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad trajectory record: ") + e.what());
  }
}

}  // namespace erl
