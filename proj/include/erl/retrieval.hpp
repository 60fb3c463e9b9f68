#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erl/heuristic_pool.hpp"
#include "erl/llm_gateway.hpp"
#include "erl/prompt_template.hpp"

namespace erl {

enum class RetrievalMethod { llm, embedding, random };

std::string_view to_string(RetrievalMethod m);
RetrievalMethod parse_retrieval_method(std::string_view text);

struct RetrievalConfig {
  RetrievalMethod method = RetrievalMethod::llm;
  int k = 20;
  OutcomeFilter outcome_filter = OutcomeFilter::all;
  std::optional<std::uint64_t> seed;  // required for random, forbidden otherwise
  int retry_limit = 1;
};

// Throws ConfigError when k < 1, retry_limit < 0, or seed presence does not match the method.
void validate(const RetrievalConfig& config);

struct RankedHeuristic {
  std::string scenario_id;
  double score = 0.0;
  std::string rationale;

  bool operator==(const RankedHeuristic&) const = default;
};

struct RetrievalResult {
  std::vector<RankedHeuristic> ranked;
  RetrievalMethod method_used = RetrievalMethod::llm;
  int requested_k = 0;
  int attempts = 0;  // ranker calls made (llm method only)
};

// Empty string when `result` satisfies every type invariant against `pool`,
// otherwise a description of the first violation.
std::string check_invariants(const RetrievalResult& result, const Pool& pool);

// The four fields the ranker prompt enumerates, one block per entry.
std::string format_pool_listing(const Pool& pool);

std::string build_retrieval_prompt(const PromptTemplate& retrieval_template, std::string_view task,
                                   const Pool& pool, int k);

// Extracts the JSON object (tolerating prose and code fences around it), keeps
// ids from `valid_ids` once each (first occurrence wins), clamps scores to
// [0, 100], orders by score then by position in `valid_ids`, truncates to k.
// Throws MalformedRankerOutput when no JSON object can be found.
std::vector<RankedHeuristic> parse_ranker_response(std::string_view text,
                                                   std::span<const std::string> valid_ids, int k);

// Throws DimensionMismatch or ZeroVector.
double cosine(std::span<const double> u, std::span<const double> v);

// All rank_* functions apply config.outcome_filter first and throw EmptyPool
// when nothing is left. `session` names the scripted-backend queue.
RetrievalResult rank_llm(std::string_view task, const Pool& pool, const RetrievalConfig& config,
                         Gateway& gateway, const PromptTemplates& templates,
                         const std::string& session = "retrieve");
RetrievalResult rank_embedding(std::string_view task, const Pool& pool, const RetrievalConfig& config,
                               Gateway& gateway);
RetrievalResult rank_random(const Pool& pool, const RetrievalConfig& config);

// Dispatch on config.method. An empty (filtered) pool yields an empty result
// instead of throwing, which is how retrieval starts cold.
RetrievalResult retrieve(std::string_view task, const Pool& pool, const RetrievalConfig& config,
                         Gateway& gateway, const PromptTemplates& templates,
                         const std::string& session = "retrieve");

}  // namespace erl
