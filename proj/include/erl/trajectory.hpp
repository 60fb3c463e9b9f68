#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace erl {

struct ToolAction {
  std::string tool;
  nlohmann::json arguments = nlohmann::json::object();

  bool operator==(const ToolAction&) const = default;
};

struct Step {
  std::string thought;
  std::optional<ToolAction> action;
  std::optional<std::string> observation;

  bool operator==(const Step&) const = default;
};

// One episode: thoughts, tool calls, observations, and the final answer.
// Invariant: a step with an action always carries an observation.
struct Trajectory {
  std::vector<Step> steps;
  std::optional<std::string> final_answer;
  int turn_count = 0;

  bool operator==(const Trajectory&) const = default;
};

inline constexpr std::size_t kDefaultObservationBudget = 2000;

// Keeps the last `budget` characters and replaces the head with a marker.
std::string truncate_observation(std::string_view observation,
                                 std::size_t budget = kDefaultObservationBudget);

// Renders a trajectory as "Thought / Action(tool, args) / Observation" blocks.
// Used both in the reflection prompt and for few-shot demonstrations.
std::string serialize_trajectory(const Trajectory& trajectory,
                                 std::size_t observation_budget = kDefaultObservationBudget);

nlohmann::json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace erl
