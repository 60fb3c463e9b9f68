#pragma once

#include <string>
#include <string_view>

#include "erl/heuristic_pool.hpp"
#include "erl/llm_gateway.hpp"
#include "erl/outcome.hpp"
#include "erl/prompt_template.hpp"
#include "erl/trajectory.hpp"

namespace erl {

// What the agent reflects on after an episode.
struct Experience {
  std::string scenario_id;
  std::string task;
  Trajectory trajectory;
  Outcome outcome = Outcome::failure;
  OutcomeSource outcome_source = OutcomeSource::env_reward;
};

std::string build_reflection_prompt(const PromptTemplate& generation_template, std::string_view task,
                                    std::string_view trajectory_text, std::string_view validation_text);

// Pulls the Analysis / Trigger / Action sections out of a reflection. Missing
// markers leave the field empty; raw_text always holds the full input.
// Throws EmptyReflection on whitespace-only text.
Heuristic parse_heuristic(std::string_view text, std::string scenario_id, std::string task, Outcome outcome,
                          OutcomeSource outcome_source, Timestamp created_at = {});

std::string build_self_assessment_prompt(const PromptTemplate& assessment_template, std::string_view task,
                                         std::string_view trajectory_text);

// Reads the last "VERDICT: SUCCESS|FAILURE" line (case-insensitive), or a bare
// "SUCCESS"/"FAILURE" response. Throws UnparseableVerdict otherwise.
Outcome parse_verdict(std::string_view response);

struct ReflectionOptions {
  std::size_t observation_budget = kDefaultObservationBudget;
  Timestamp created_at{};
};

// One self_assessment call. The caller tags the experience as self_assessed.
Outcome infer_outcome(std::string_view scenario_id, std::string_view task, const Trajectory& trajectory,
                      Gateway& gateway, const PromptTemplates& templates,
                      const ReflectionOptions& options = {});

// Renders the generation prompt, asks the model once (billed to generation)
// and parses the answer into a Heuristic.
Heuristic reflect(const Experience& experience, Gateway& gateway, const PromptTemplates& templates,
                  const ReflectionOptions& options = {});

}  // namespace erl
