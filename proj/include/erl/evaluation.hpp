#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "erl/heuristic_pool.hpp"
#include "erl/llm_gateway.hpp"
#include "erl/react_agent.hpp"
#include "erl/reflection.hpp"
#include "erl/retrieval.hpp"
#include "erl/sim_env.hpp"

namespace erl {

// scenario x run outcome grid. Every row has exactly `runs` entries.
struct RunMatrix {
  std::vector<std::string> scenario_ids;
  std::vector<Split> splits;  // parallel to scenario_ids, or empty
  std::vector<std::vector<Outcome>> outcomes;
  int runs = 0;

  void validate() const;  // throws PreconditionError
  RunMatrix subset(Split split) const;
};

double success_rate(const RunMatrix& m);
double pass_at_k(const RunMatrix& m);   // rows with at least one success
double pass_hat_k(const RunMatrix& m);  // rows with every run a success

// {"runs": k, "overall": {...}, "execution": {...}, "search": {...}}, keys
// "sr", "pass@k", "pass^k" with k spelled out.
nlohmann::json metrics_summary(const RunMatrix& m);
void write_run_matrix_csv(const std::filesystem::path& path, const RunMatrix& m);

// Everything an experiment phase needs to run episodes and reflect on them.
struct Services {
  const Environment* env = nullptr;
  Gateway* gateway = nullptr;
  const PromptTemplates* templates = nullptr;
  EpisodeLimits limits;
  std::size_t observation_budget = kDefaultObservationBudget;
  // Timestamp for new heuristics; defaults to the wall clock.
  std::function<Timestamp(const Scenario&)> clock;
};

struct SkippedScenario {
  std::string scenario_id;
  std::string reason;
  bool infrastructure = false;  // caused by a BackendError
};

struct AccumulateOptions {
  bool use_env_reward = true;  // false: the agent judges its own outcome
};

struct AccumulateResult {
  Pool pool;
  RunMatrix source;
  std::vector<TrajectoryRecord> trajectories;
  std::vector<SkippedScenario> skipped;
};

// One unguided single attempt per scenario, then reflect and append.
// Per-scenario errors are recorded in `skipped`, never thrown.
AccumulateResult accumulate(std::span<const Scenario> scenarios, Services& services,
                            const AccumulateOptions& options = {}, Pool initial = {});

struct EvaluateOptions {
  RetrievalConfig retrieval;
  GuidanceKind guidance = GuidanceKind::none;
  int runs = 3;
  int parallel = 1;
  std::vector<TrajectoryRecord> fewshot_source;
  std::int64_t fewshot_budget_tokens = 20000;
};

struct ScenarioLog {
  std::string scenario_id;
  bool retrieval_invoked = false;
  RetrievalResult retrieval;
  GuidancePayload guidance;
  std::vector<int> turns;
};

struct EvaluateResult {
  RunMatrix matrix;
  UsageReport usage;
  std::vector<ScenarioLog> log;
  double average_turns = 0.0;
};

// Retrieves once per scenario, then runs `runs` episodes with that guidance.
// Only infrastructure errors propagate.
EvaluateResult evaluate(std::span<const Scenario> scenarios, const Pool& pool, const EvaluateOptions& options,
                        Services& services);

struct IterativeConfig {
  int num_batches = 1;
  int batch_size = 1;
  RetrievalConfig retrieval;
  std::optional<std::uint64_t> shuffle_seed;  // input order when unset
  AccumulateOptions accumulate;

  void validate() const;
};

struct IterationLog {
  std::string scenario_id;
  int batch = 0;
  std::vector<std::string> pool_ids_at_retrieval;
  std::vector<std::string> retrieved_ids;
  bool guided = false;
  std::size_t pool_size_after = 0;
};

struct IterativeResult {
  Pool pool;
  RunMatrix source;
  std::vector<IterationLog> log;
  std::vector<TrajectoryRecord> trajectories;
  std::vector<SkippedScenario> skipped;
};

// Retrieve from the current pool, execute, verify, reflect, append, task by
// task and batch by batch.
IterativeResult iterative_erl(std::span<const Scenario> scenarios, const IterativeConfig& config,
                              Services& services);

// Dollar rates per million tokens. Any missing rate is a MissingPrice error at report time.
struct PriceTable {
  std::optional<double> input_per_million;
  std::optional<double> cached_input_per_million;
  std::optional<double> output_per_million;

  static PriceTable load(const std::filesystem::path& path);
  static PriceTable from_json(const nlohmann::json& j);
};

struct CostRow {
  std::string step;  // "Heuristic generation", "Heuristic retrieval", "Scenario rollout", "Total"
  std::int64_t input_tokens = 0;
  std::int64_t cached_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t calls = 0;
  double cached_percent = 0.0;
  double cost = 0.0;
};

struct CostReport {
  std::vector<CostRow> rows;  // generation, retrieval, rollout, [self-assessment,] total
  std::optional<double> average_turns;

  const CostRow& total() const { return rows.back(); }
  nlohmann::json to_json() const;
};

CostReport cost_report(const UsageReport& usage, const PriceTable& prices,
                       std::optional<double> average_turns = std::nullopt);

double row_cost(const StepTotals& t, const PriceTable& prices);

}  // namespace erl
