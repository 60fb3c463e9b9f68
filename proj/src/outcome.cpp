#include "erl/outcome.hpp"

#include <string>

#include "erl/errors.hpp"

namespace erl {

std::string_view to_string(Outcome o) {
  return o == Outcome::success ? "success" : "failure";
}

std::string_view to_string(OutcomeSource s) {
  return s == OutcomeSource::env_reward ? "env_reward" : "self_assessed";
}

Outcome parse_outcome(std::string_view text) {
  if (text == "success") return Outcome::success;
  if (text == "failure") return Outcome::failure;
  throw Error("unknown outcome '" + std::string(text) + "'");
}

OutcomeSource parse_outcome_source(std::string_view text) {
  if (text == "env_reward") return OutcomeSource::env_reward;
  if (text == "self_assessed") return OutcomeSource::self_assessed;
  throw Error("unknown outcome_source '" + std::string(text) + "'");
}

}  // namespace erl
