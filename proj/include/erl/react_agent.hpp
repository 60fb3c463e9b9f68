#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "erl/heuristic_pool.hpp"
#include "erl/llm_gateway.hpp"
#include "erl/retrieval.hpp"
#include "erl/sim_env.hpp"
#include "erl/trajectory.hpp"

namespace erl {

enum class GuidanceKind { none, heuristics, fewshot_trajectories };

std::string_view to_string(GuidanceKind k);
GuidanceKind parse_guidance_kind(std::string_view text);

// Context injected once, at the start of an episode.
struct GuidancePayload {
  GuidanceKind kind = GuidanceKind::none;
  std::vector<std::string> items;
  std::int64_t token_estimate = 0;
};

// Fixed section delimiters, so prompt diffs can find the injected block.
inline constexpr std::string_view kLessonsBegin = "=== BEGIN Lessons from past experience ===";
inline constexpr std::string_view kLessonsEnd = "=== END Lessons from past experience ===";
inline constexpr std::string_view kExamplesBegin = "=== BEGIN Example trajectories ===";
inline constexpr std::string_view kExamplesEnd = "=== END Example trajectories ===";

inline constexpr std::string_view kFinalAnswerSentinel = "FINAL ANSWER:";

std::string render_heuristic_block(const Heuristic& h);

// Heuristic blocks for the retrieved ids, in ranked order.
GuidancePayload heuristic_guidance(const Pool& pool, const RetrievalResult& retrieved);

// A past episode used as a few-shot demonstration.
struct TrajectoryRecord {
  std::string scenario_id;
  std::string task;
  Outcome outcome = Outcome::failure;
  Trajectory trajectory;
};

nlohmann::json to_json(const TrajectoryRecord& r);
TrajectoryRecord trajectory_record_from_json(const nlohmann::json& j);
void save_trajectories(const std::filesystem::path& path, std::span<const TrajectoryRecord> records);
std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path);

std::string render_fewshot_item(const TrajectoryRecord& r);

// Whole demonstrations, in order, while the running estimate stays within budget.
GuidancePayload render_fewshot_block(std::span<const TrajectoryRecord> trajectories, std::int64_t budget_tokens);

std::string compose_system_prompt(std::string_view base, const GuidancePayload& guidance);

struct FinalAnswer {
  std::string text;
};

struct MalformedAction {
  std::string reason;
};

using ParsedAction = std::variant<ToolCall, FinalAnswer, MalformedAction>;

// A structured tool call wins; otherwise a line starting with the final-answer
// sentinel ends the episode; anything else is malformed.
ParsedAction parse_action(const ChatMessage& assistant_message);

struct EpisodeLimits {
  int max_turns = 40;
  std::size_t observation_budget = kDefaultObservationBudget;
};

struct EpisodeResult {
  Trajectory trajectory;
  Outcome outcome = Outcome::failure;
  WorldState final_state;
};

// One ReAct episode against a fresh working copy of `universe`. Model calls
// are billed to rollout under session "rollout/<scenario_id>".
EpisodeResult run_episode(const Scenario& scenario, const Universe& universe, Gateway& gateway,
                          std::string_view base_system_prompt, const GuidancePayload& guidance,
                          const EpisodeLimits& limits = {});

}  // namespace erl
