#pragma once

#include <string>
#include <string_view>

namespace erl {

enum class Outcome { success, failure };

// Where an outcome label came from: the environment verifier or the model itself.
enum class OutcomeSource { env_reward, self_assessed };

std::string_view to_string(Outcome o);
std::string_view to_string(OutcomeSource s);

// Both throw erl::Error on unknown text.
Outcome parse_outcome(std::string_view text);
OutcomeSource parse_outcome_source(std::string_view text);

}  // namespace erl
