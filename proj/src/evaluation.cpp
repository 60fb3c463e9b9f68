#include "erl/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "erl/errors.hpp"

namespace erl {
namespace {

using nlohmann::json;

Timestamp now_or(const Services& s, const Scenario& scenario) {
  if (s.clock) return s.clock(scenario);
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

void require(const Services& s) {
  if (s.env == nullptr || s.gateway == nullptr || s.templates == nullptr) {
    throw PreconditionError("services need an environment, a gateway and templates");
  }
}

struct Experienced {
  EpisodeResult episode;
  Heuristic heuristic;
};

// Execute -> reward -> reflect for one scenario. Throws on any failure.
EpisodeResult execute(const Scenario& scenario, Services& s, const GuidancePayload& guidance) {
  return run_episode(scenario, s.env->universe(scenario.universe_id), *s.gateway, s.templates->agent_system,
                     guidance, s.limits);
}

Heuristic analyze(const Scenario& scenario, const EpisodeResult& episode, Services& s,
                  const AccumulateOptions& options) {
  ReflectionOptions ro;
  ro.observation_budget = s.observation_budget;
  ro.created_at = now_or(s, scenario);
  Experience exp{scenario.scenario_id, scenario.task, episode.trajectory, episode.outcome,
                 OutcomeSource::env_reward};
  if (!options.use_env_reward) {
    exp.outcome = infer_outcome(scenario.scenario_id, scenario.task, episode.trajectory, *s.gateway,
                                *s.templates, ro);
    exp.outcome_source = OutcomeSource::self_assessed;
  }
  return reflect(exp, *s.gateway, *s.templates, ro);
}

json split_metrics(const RunMatrix& m) {
  const std::string k = std::to_string(m.runs);
  return json{{"scenarios", m.scenario_ids.size()},
              {"sr", success_rate(m)},
              {"pass@" + k, pass_at_k(m)},
              {"pass^" + k, pass_hat_k(m)}};
}

}  // namespace

// --- RunMatrix ---------------------------------------------------------------------

void RunMatrix::validate() const {
  if (runs < 1) throw PreconditionError("run matrix needs at least one run per scenario");
  if (outcomes.size() != scenario_ids.size()) throw PreconditionError("one row per scenario expected");
  if (!splits.empty() && splits.size() != scenario_ids.size()) {
    throw PreconditionError("splits must be parallel to scenario_ids");
  }
  for (const auto& row : outcomes) {
    if (static_cast<int>(row.size()) != runs) throw PreconditionError("run matrix is not rectangular");
  }
}

RunMatrix RunMatrix::subset(Split split) const {
  RunMatrix out;
  out.runs = runs;
  for (std::size_t i = 0; i < scenario_ids.size() && i < splits.size(); ++i) {
    if (splits[i] != split) continue;
    out.scenario_ids.push_back(scenario_ids[i]);
    out.splits.push_back(split);
    out.outcomes.push_back(outcomes[i]);
  }
  return out;
}

double success_rate(const RunMatrix& m) {
  m.validate();
  std::size_t cells = 0, hits = 0;
  for (const auto& row : m.outcomes) {
    cells += row.size();
    hits += static_cast<std::size_t>(std::count(row.begin(), row.end(), Outcome::success));
  }
  return cells == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(cells);
}

double pass_at_k(const RunMatrix& m) {
  m.validate();
  if (m.outcomes.empty()) return 0.0;
  const auto solved = std::count_if(m.outcomes.begin(), m.outcomes.end(), [](const auto& row) {
    return std::find(row.begin(), row.end(), Outcome::success) != row.end();
  });
  return static_cast<double>(solved) / static_cast<double>(m.outcomes.size());
}

double pass_hat_k(const RunMatrix& m) {
  m.validate();
  if (m.outcomes.empty()) return 0.0;
  const auto reliable = std::count_if(m.outcomes.begin(), m.outcomes.end(), [](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](Outcome o) { return o == Outcome::success; });
  });
  return static_cast<double>(reliable) / static_cast<double>(m.outcomes.size());
}

json metrics_summary(const RunMatrix& m) {
  m.validate();
  json j{{"runs", m.runs}, {"overall", split_metrics(m)}};
  if (!m.splits.empty()) {
    for (Split s : {Split::execution, Split::search}) {
      RunMatrix sub = m.subset(s);
      if (!sub.scenario_ids.empty()) j[std::string(to_string(s))] = split_metrics(sub);
    }
  }
  return j;
}

void write_run_matrix_csv(const std::filesystem::path& path, const RunMatrix& m) {
  m.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "scenario_id,run,outcome\n";
  for (std::size_t i = 0; i < m.scenario_ids.size(); ++i) {
    for (int r = 0; r < m.runs; ++r) {
      out << m.scenario_ids[i] << ',' << r << ',' << to_string(m.outcomes[i][static_cast<std::size_t>(r)]) << '\n';
    }
  }
}

// --- accumulation ------------------------------------------------------------------

AccumulateResult accumulate(std::span<const Scenario> scenarios, Services& services,
                            const AccumulateOptions& options, Pool initial) {
  require(services);
  AccumulateResult result;
  result.pool = std::move(initial);
  result.source.runs = 1;
  for (const Scenario& scenario : scenarios) {
    try {
      EpisodeResult episode = execute(scenario, services, GuidancePayload{});
      result.source.scenario_ids.push_back(scenario.scenario_id);
      result.source.splits.push_back(scenario.split);
      result.source.outcomes.push_back({episode.outcome});
      result.trajectories.push_back({scenario.scenario_id, scenario.task, episode.outcome, episode.trajectory});
      result.pool.append(analyze(scenario, episode, services, options));
    } catch (const BackendError& e) {
      result.skipped.push_back({scenario.scenario_id, e.what(), true});
    } catch (const std::exception& e) {
      result.skipped.push_back({scenario.scenario_id, e.what()});
    }
  }
  return result;
}

// --- evaluation --------------------------------------------------------------------

EvaluateResult evaluate(std::span<const Scenario> scenarios, const Pool& pool, const EvaluateOptions& options,
                        Services& services) {
  require(services);
  if (options.runs < 1) throw ConfigError("runs must be at least 1");
  if (options.guidance != GuidanceKind::none) validate(options.retrieval);

  const std::size_t ledger_start = services.gateway->ledger().size();
  std::vector<ScenarioLog> logs(scenarios.size());
  std::vector<std::vector<Outcome>> rows(scenarios.size());

  auto run_one = [&](std::size_t i) {
    const Scenario& scenario = scenarios[i];
    ScenarioLog& log = logs[i];
    log.scenario_id = scenario.scenario_id;
    const std::string session = "retrieve/" + scenario.scenario_id;

    if (options.guidance == GuidanceKind::heuristics) {
      log.retrieval_invoked = true;
      log.retrieval = retrieve(scenario.task, pool, options.retrieval, *services.gateway, *services.templates, session);
      log.guidance = heuristic_guidance(pool, log.retrieval);
    } else if (options.guidance == GuidanceKind::fewshot_trajectories) {
      std::vector<TrajectoryRecord> chosen;
      if (!pool.empty()) {
        log.retrieval_invoked = true;
        log.retrieval =
            retrieve(scenario.task, pool, options.retrieval, *services.gateway, *services.templates, session);
        for (const RankedHeuristic& r : log.retrieval.ranked) {
          auto it = std::find_if(options.fewshot_source.begin(), options.fewshot_source.end(),
                                 [&](const TrajectoryRecord& t) { return t.scenario_id == r.scenario_id; });
          if (it != options.fewshot_source.end()) chosen.push_back(*it);
        }
      } else {
        const std::size_t n = std::min<std::size_t>(options.fewshot_source.size(),
                                                    static_cast<std::size_t>(std::max(options.retrieval.k, 1)));
        chosen.assign(options.fewshot_source.begin(), options.fewshot_source.begin() + static_cast<std::ptrdiff_t>(n));
      }
      log.guidance = render_fewshot_block(chosen, options.fewshot_budget_tokens);
    }

    for (int r = 0; r < options.runs; ++r) {
      EpisodeResult ep = execute(scenario, services, log.guidance);
      rows[i].push_back(ep.outcome);
      log.turns.push_back(ep.trajectory.turn_count);
    }
  };

  const int workers = std::clamp(options.parallel, 1, static_cast<int>(std::max<std::size_t>(scenarios.size(), 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::jthread> pool_threads;
    for (int w = 0; w < workers; ++w) {
      pool_threads.emplace_back([&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool_threads.clear();
    if (failure) std::rethrow_exception(failure);
  }

  EvaluateResult result;
  result.matrix.runs = options.runs;
  std::int64_t turns = 0, episodes = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    result.matrix.scenario_ids.push_back(scenarios[i].scenario_id);
    result.matrix.splits.push_back(scenarios[i].split);
    result.matrix.outcomes.push_back(std::move(rows[i]));
    for (int t : logs[i].turns) {
      turns += t;
      ++episodes;
    }
  }
  result.log = std::move(logs);
  result.average_turns = episodes == 0 ? 0.0 : static_cast<double>(turns) / static_cast<double>(episodes);
  const std::vector<Usage> entries = services.gateway->ledger().snapshot();
  result.usage = usage_report(std::span<const Usage>(entries).subspan(ledger_start));
  return result;
}

// --- iterative ERL -----------------------------------------------------------------

void IterativeConfig::validate() const {
  if (num_batches < 1) throw ConfigError("num_batches must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  erl::validate(retrieval);
}

IterativeResult iterative_erl(std::span<const Scenario> scenarios, const IterativeConfig& config,
                              Services& services) {
  require(services);
  config.validate();

  std::vector<std::size_t> order(scenarios.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config.shuffle_seed) {
    std::mt19937_64 rng(*config.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  PoolStore store;
  IterativeResult result;
  result.source.runs = 1;
  const std::size_t total =
      std::min(order.size(), static_cast<std::size_t>(config.num_batches) * static_cast<std::size_t>(config.batch_size));

  for (std::size_t n = 0; n < total; ++n) {
    const Scenario& scenario = scenarios[order[n]];
    IterationLog log;
    log.scenario_id = scenario.scenario_id;
    log.batch = static_cast<int>(n / static_cast<std::size_t>(config.batch_size));

    const PoolSnapshot pool = store.snapshot();
    for (const Heuristic& h : pool->entries()) log.pool_ids_at_retrieval.push_back(h.scenario_id);

    try {
      GuidancePayload guidance;
      const RetrievalResult retrieved = retrieve(scenario.task, *pool, config.retrieval, *services.gateway,
                                                 *services.templates, "retrieve/" + scenario.scenario_id);
      for (const RankedHeuristic& r : retrieved.ranked) log.retrieved_ids.push_back(r.scenario_id);
      guidance = heuristic_guidance(*pool, retrieved);
      log.guided = guidance.kind != GuidanceKind::none;

      EpisodeResult episode = execute(scenario, services, guidance);
      result.source.scenario_ids.push_back(scenario.scenario_id);
      result.source.splits.push_back(scenario.split);
      result.source.outcomes.push_back({episode.outcome});
      result.trajectories.push_back({scenario.scenario_id, scenario.task, episode.outcome, episode.trajectory});
      store.append(analyze(scenario, episode, services, config.accumulate));
    } catch (const BackendError& e) {
      result.skipped.push_back({scenario.scenario_id, e.what(), true});
    } catch (const std::exception& e) {
      result.skipped.push_back({scenario.scenario_id, e.what()});
    }
    log.pool_size_after = store.size();
    result.log.push_back(std::move(log));
  }
  result.pool = *store.snapshot();
  return result;
}

// --- cost accounting -------------------------------------------------------------

PriceTable PriceTable::from_json(const json& j) {
  PriceTable p;
  auto rate = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number()) throw ConfigError(std::string("price '") + key + "' must be a number");
    return j[key].get<double>();
  };
  p.input_per_million = rate("input_per_million");
  p.cached_input_per_million = rate("cached_input_per_million");
  p.output_per_million = rate("output_per_million");
  return p;
}

PriceTable PriceTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("price table " + path.string() + " is not a JSON object");
  return from_json(j);
}

double row_cost(const StepTotals& t, const PriceTable& prices) {
  if (!prices.input_per_million) throw MissingPrice("price table lacks input_per_million");
  if (!prices.cached_input_per_million) throw MissingPrice("price table lacks cached_input_per_million");
  if (!prices.output_per_million) throw MissingPrice("price table lacks output_per_million");
  const double uncached = static_cast<double>(t.prompt_tokens - t.cached_prompt_tokens);
  return (uncached * *prices.input_per_million +
          static_cast<double>(t.cached_prompt_tokens) * *prices.cached_input_per_million +
          static_cast<double>(t.completion_tokens) * *prices.output_per_million) /
         1e6;
}

CostReport cost_report(const UsageReport& usage, const PriceTable& prices, std::optional<double> average_turns) {
  CostReport report;
  report.average_turns = average_turns;
  auto make_row = [&](std::string name, const StepTotals& t) {
    CostRow row;
    row.step = std::move(name);
    row.input_tokens = t.prompt_tokens;
    row.cached_tokens = t.cached_prompt_tokens;
    row.output_tokens = t.completion_tokens;
    row.calls = t.calls;
    row.cached_percent = t.prompt_tokens == 0 ? 0.0
                                               : 100.0 * static_cast<double>(t.cached_prompt_tokens) /
                                                     static_cast<double>(t.prompt_tokens);
    row.cost = row_cost(t, prices);
    return row;
  };
  report.rows.push_back(make_row("Heuristic generation", usage.at(StepLabel::generation)));
  report.rows.push_back(make_row("Heuristic retrieval", usage.at(StepLabel::retrieval)));
  report.rows.push_back(make_row("Scenario rollout", usage.at(StepLabel::rollout)));
  if (usage.at(StepLabel::self_assessment).calls > 0) {
    report.rows.push_back(make_row("Self-assessment", usage.at(StepLabel::self_assessment)));
  }
  report.rows.push_back(make_row("Total", usage.total));
  return report;
}

json CostReport::to_json() const {
  json rows_json = json::array();
  for (const CostRow& r : rows) {
    rows_json.push_back({{"step", r.step},
                         {"input_tokens", r.input_tokens},
                         {"cached_tokens", r.cached_tokens},
                         {"cached_percent", r.cached_percent},
                         {"output_tokens", r.output_tokens},
                         {"calls", r.calls},
                         {"cost", r.cost}});
  }
  json j{{"rows", rows_json}};
  if (average_turns) j["average_turns"] = *average_turns;
  return j;
}

}  // namespace erl
