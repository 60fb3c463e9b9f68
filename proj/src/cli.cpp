#include "erl/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "erl/errors.hpp"
#include "erl/evaluation.hpp"
#include "erl/heuristic_pool.hpp"
#include "erl/llm_gateway.hpp"
#include "erl/prompt_template.hpp"
#include "erl/react_agent.hpp"
#include "erl/retrieval.hpp"
#include "erl/sim_env.hpp"

namespace erl {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

// Every knob of every subcommand. Each command checks the ones it needs.
struct RunConfig {
  std::string universe_dir;
  std::string scenarios;
  std::string pool;
  std::string backend = "scripted";
  std::string script;
  std::string method = "llm";
  int k = 20;
  std::string filter = "all";
  std::string guidance = "none";
  int runs = 3;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shuffle_seed;
  std::string prices;
  std::string output_dir = "out";
  bool no_reward = false;
  int parallel = 1;
  std::string templates;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-5-mini";
  std::string embed_model = "text-embedding-3-small";
  int max_turns = EpisodeLimits{}.max_turns;
  std::string trajectories;
  int batches = 1;
  int batch_size = 1;
  std::string task;
  std::string scenario;
  std::string usage;
  std::int64_t fewshot_budget = 20000;
};

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError(msg); }

void need(const std::string& value, const char* flag) {
  if (value.empty()) config_error(std::string(flag) + " is required for this command");
}

// Missing inputs are configuration mistakes, not infrastructure failures.
void need_path(const std::string& value, const char* flag) {
  need(value, flag);
  if (!std::filesystem::exists(value)) config_error(std::string(flag) + ": no such file or directory: " + value);
}

RetrievalConfig retrieval_config(const RunConfig& c) {
  RetrievalConfig r;
  r.method = parse_retrieval_method(c.method);
  r.k = c.k;
  r.outcome_filter = parse_outcome_filter(c.filter);
  r.seed = c.seed;
  validate(r);
  return r;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Backends, templates and environment, all loaded before any output is written.
struct Runtime {
  PromptTemplates templates;
  Environment env;
  std::unique_ptr<ChatBackend> chat;
  std::unique_ptr<EmbedBackend> embed;
  std::shared_ptr<HttpBackend> http;
  UsageLedger ledger;
  std::unique_ptr<Gateway> gateway;
  bool scripted = true;

  Services services(const RunConfig& c) {
    Services s;
    s.env = &env;
    s.gateway = gateway.get();
    s.templates = &templates;
    s.limits.max_turns = c.max_turns;
    if (scripted) {
      // Replays must not depend on the wall clock.
      const Environment* e = &env;
      s.clock = [e](const Scenario& sc) {
        std::string iso = e->universe(sc.universe_id).now;
        iso[10] = 'T';
        return parse_timestamp(iso + "Z");
      };
    }
    return s;
  }
};

// Forwards both interfaces to one shared HTTP client.
class HttpEmbedRef final : public EmbedBackend {
 public:
  explicit HttpEmbedRef(std::shared_ptr<HttpBackend> b) : b_(std::move(b)) {}
  EmbedResult embed(std::span<const std::string> texts) override { return b_->embed(texts); }

 private:
  std::shared_ptr<HttpBackend> b_;
};

class HttpChatRef final : public ChatBackend {
 public:
  explicit HttpChatRef(std::shared_ptr<HttpBackend> b) : b_(std::move(b)) {}
  ChatResult complete(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                      const ChatParams& params) override {
    return b_->complete(messages, tools, params);
  }

 private:
  std::shared_ptr<HttpBackend> b_;
};

std::unique_ptr<Runtime> make_runtime(const RunConfig& c, bool needs_env, bool needs_chat = true) {
  auto rt = std::make_unique<Runtime>();
  if (!c.templates.empty()) need_path(c.templates, "--templates");
  rt->templates = PromptTemplates::load(c.templates.empty() ? default_template_dir() : std::filesystem::path(c.templates));
  if (needs_env) {
    need_path(c.universe_dir, "--universe-dir");
    rt->env = Environment::load_dir(c.universe_dir);
  }
  if (c.backend == "scripted") {
    // Without chat calls a script is optional.
    if (c.script.empty() && needs_chat) config_error("--backend scripted needs --script");
    if (!c.script.empty()) need_path(c.script, "--script");
    auto scripted = c.script.empty() ? std::make_unique<ScriptedBackend>()
                                     : std::make_unique<ScriptedBackend>(ScriptedBackend::load(c.script));
    if (scripted->embeddings().empty()) {
      rt->embed = std::make_unique<HashEmbedder>();
    } else {
      rt->embed = std::make_unique<ScriptedEmbedder>(scripted->embeddings());
    }
    rt->chat = std::move(scripted);
    rt->scripted = true;
  } else if (c.backend == "live") {
    if (std::getenv("ERL_API_KEY") == nullptr) config_error("--backend live needs ERL_API_KEY in the environment");
    HttpConfig hc;
    hc.base_url = c.base_url;
    hc.model = c.model;
    hc.embed_model = c.embed_model;
    rt->http = std::make_shared<HttpBackend>(hc);
    rt->chat = std::make_unique<HttpChatRef>(rt->http);
    rt->embed = std::make_unique<HttpEmbedRef>(rt->http);
    rt->scripted = false;
  } else {
    config_error("unknown backend '" + c.backend + "' (expected live or scripted)");
  }
  rt->gateway = std::make_unique<Gateway>(*rt->chat, *rt->embed, rt->ledger);
  return rt;
}

std::vector<Scenario> load_checked_scenarios(const RunConfig& c, const Environment& env) {
  need_path(c.scenarios, "--scenarios");
  std::vector<Scenario> out = load_scenarios(c.scenarios);
  for (const Scenario& s : out) {
    if (!env.has_universe(s.universe_id)) {
      config_error("scenario " + s.scenario_id + " references unknown universe " + s.universe_id);
    }
  }
  return out;
}

std::optional<PriceTable> load_prices(const RunConfig& c) {
  if (c.prices.empty()) return std::nullopt;
  need_path(c.prices, "--prices");
  PriceTable p = PriceTable::load(c.prices);
  row_cost(StepTotals{}, p);  // surfaces MissingPrice before any work starts
  return p;
}

json totals_json(const StepTotals& t) {
  return {{"prompt_tokens", t.prompt_tokens},
          {"completion_tokens", t.completion_tokens},
          {"cached_prompt_tokens", t.cached_prompt_tokens},
          {"calls", t.calls}};
}

StepTotals totals_from_json(const json& j) {
  StepTotals t;
  t.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
  t.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
  t.cached_prompt_tokens = j.at("cached_prompt_tokens").get<std::int64_t>();
  t.calls = j.at("calls").get<std::int64_t>();
  return t;
}

json usage_json(const UsageReport& u, std::optional<double> average_turns) {
  json steps = json::object();
  for (const auto& [label, t] : u.steps) steps[std::string(to_string(label))] = totals_json(t);
  json j{{"steps", steps}, {"total", totals_json(u.total)}};
  if (average_turns) j["average_turns"] = *average_turns;
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::filesystem::path output_dir(const RunConfig& c) {
  std::filesystem::path dir(c.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void print_metrics(std::ostream& out, const RunMatrix& m) {
  const json summary = metrics_summary(m);
  const std::string k = std::to_string(m.runs);
  out << pad("split", 11) << pad("scenarios", 11) << pad("SR", 9) << pad("pass@" + k, 9) << "pass^" + k << '\n';
  for (const char* name : {"overall", "execution", "search"}) {
    if (!summary.contains(name)) continue;
    const json& s = summary[name];
    out << pad(name, 11) << pad(std::to_string(s["scenarios"].get<int>()), 11) << pad(pct(s["sr"]), 9)
        << pad(pct(s["pass@" + k]), 9) << pct(s["pass^" + k]) << '\n';
  }
}

void print_cost(std::ostream& out, const CostReport& r) {
  out << pad("step", 22) << pad("input", 12) << pad("cached", 10) << pad("output", 12) << pad("calls", 8)
      << "cost ($)\n";
  for (const CostRow& row : r.rows) {
    out << pad(row.step, 22) << pad(std::to_string(row.input_tokens), 12) << pad(fixed(row.cached_percent, 1) + "%", 10)
        << pad(std::to_string(row.output_tokens), 12) << pad(std::to_string(row.calls), 8) << fixed(row.cost, 4)
        << '\n';
  }
  if (r.average_turns) out << "average turns: " << fixed(*r.average_turns, 2) << '\n';
}

void write_usage_and_cost(const std::filesystem::path& dir, const UsageReport& usage, std::optional<double> avg_turns,
                          const std::optional<PriceTable>& prices, std::ostream& out) {
  write_json(dir / "usage.json", usage_json(usage, avg_turns));
  if (prices) {
    CostReport report = cost_report(usage, *prices, avg_turns);
    write_json(dir / "cost_report.json", report.to_json());
    print_cost(out, report);
  }
}

// Batch commands finish their outputs first, then report backend trouble through the exit code.
int report_skipped(std::ostream& err, const std::vector<SkippedScenario>& skipped) {
  int code = kExitOk;
  for (const SkippedScenario& s : skipped) {
    err << "skipped " << s.scenario_id << ": " << s.reason << '\n';
    if (s.infrastructure) code = kExitBackend;
  }
  return code;
}

json retrieval_json(const RetrievalResult& r) {
  json ranked = json::array();
  for (const RankedHeuristic& h : r.ranked) {
    ranked.push_back({{"scenario_id", h.scenario_id}, {"score", h.score}, {"rationale", h.rationale}});
  }
  return {{"method_used", to_string(r.method_used)},
          {"requested_k", r.requested_k},
          {"attempts", r.attempts},
          {"ranked", ranked}};
}

// --- commands ----------------------------------------------------------------------

int cmd_accumulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  need(c.pool, "--pool");
  auto rt = make_runtime(c, true);
  const std::vector<Scenario> scenarios = load_checked_scenarios(c, rt->env);
  const auto prices = load_prices(c);
  Pool initial = std::filesystem::exists(c.pool) ? Pool::load(c.pool) : Pool{};

  Services services = rt->services(c);
  AccumulateOptions options;
  options.use_env_reward = !c.no_reward;
  AccumulateResult result = accumulate(scenarios, services, options, std::move(initial));

  const auto dir = output_dir(c);
  result.pool.save(c.pool);
  if (!result.source.scenario_ids.empty()) {
    write_run_matrix_csv(dir / "run_matrix.csv", result.source);
    write_json(dir / "metrics.json", metrics_summary(result.source));
  }
  save_trajectories(dir / "trajectories.jsonl", result.trajectories);
  const int status = report_skipped(err, result.skipped);

  out << "pool: " << result.pool.size() << " heuristics in " << c.pool << '\n';
  if (!result.source.scenario_ids.empty()) print_metrics(out, result.source);
  write_usage_and_cost(dir, usage_report(rt->ledger), std::nullopt, prices, out);
  return status;
}

int cmd_retrieve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  need(c.pool, "--pool");
  need(c.task, "--task");
  const RetrievalConfig cfg = retrieval_config(c);
  need_path(c.pool, "--pool");
  auto rt = make_runtime(c, false, cfg.method == RetrievalMethod::llm);
  const Pool pool = Pool::load(c.pool);
  if (pool.filtered(cfg.outcome_filter).empty()) {
    err << "empty pool: no heuristics to retrieve from in " << c.pool << '\n';
    return kExitConfig;
  }
  const RetrievalResult r = retrieve(c.task, pool, cfg, *rt->gateway, rt->templates);
  out << "method: " << to_string(r.method_used) << "  k: " << r.requested_k << "  returned: " << r.ranked.size()
      << '\n';
  for (std::size_t i = 0; i < r.ranked.size(); ++i) {
    const RankedHeuristic& h = r.ranked[i];
    out << (i + 1) << ". " << h.scenario_id << "  score " << fixed(h.score, 1);
    if (!h.rationale.empty()) out << "  " << h.rationale;
    out << '\n';
  }
  return kExitOk;
}

GuidancePayload guidance_for(const RunConfig& c, const Scenario& s, Runtime& rt, const Pool& pool,
                             const std::vector<TrajectoryRecord>& trajectories) {
  const GuidanceKind kind = parse_guidance_kind(c.guidance);
  if (kind == GuidanceKind::none) return {};
  if (kind == GuidanceKind::fewshot_trajectories && pool.empty()) {
    return render_fewshot_block(trajectories, c.fewshot_budget);
  }
  const RetrievalResult r =
      retrieve(s.task, pool, retrieval_config(c), *rt.gateway, rt.templates, "retrieve/" + s.scenario_id);
  if (kind == GuidanceKind::heuristics) return heuristic_guidance(pool, r);
  std::vector<TrajectoryRecord> chosen;
  for (const RankedHeuristic& h : r.ranked) {
    for (const TrajectoryRecord& t : trajectories) {
      if (t.scenario_id == h.scenario_id) chosen.push_back(t);
    }
  }
  return render_fewshot_block(chosen, c.fewshot_budget);
}

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream&) {
  need(c.scenario, "--scenario");
  const GuidanceKind kind = parse_guidance_kind(c.guidance);
  if (kind == GuidanceKind::heuristics) need(c.pool, "--pool");
  if (kind == GuidanceKind::fewshot_trajectories) need(c.trajectories, "--trajectories");
  if (kind != GuidanceKind::none) retrieval_config(c);
  auto rt = make_runtime(c, true);
  const std::vector<Scenario> scenarios = load_checked_scenarios(c, rt->env);
  auto it = std::find_if(scenarios.begin(), scenarios.end(),
                         [&](const Scenario& s) { return s.scenario_id == c.scenario; });
  if (it == scenarios.end()) config_error("no scenario " + c.scenario + " in " + c.scenarios);
  if (!c.pool.empty()) need_path(c.pool, "--pool");
  if (!c.trajectories.empty()) need_path(c.trajectories, "--trajectories");
  const Pool pool = c.pool.empty() ? Pool{} : Pool::load(c.pool);
  const std::vector<TrajectoryRecord> trajectories =
      c.trajectories.empty() ? std::vector<TrajectoryRecord>{} : load_trajectories(c.trajectories);

  const GuidancePayload guidance = guidance_for(c, *it, *rt, pool, trajectories);
  EpisodeLimits limits;
  limits.max_turns = c.max_turns;
  const EpisodeResult ep =
      run_episode(*it, rt->env.universe(it->universe_id), *rt->gateway, rt->templates.agent_system, guidance, limits);
  out << serialize_trajectory(ep.trajectory, kDefaultObservationBudget) << '\n';
  out << "outcome: " << to_string(ep.outcome) << "  turns: " << ep.trajectory.turn_count << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream&) {
  EvaluateOptions options;
  options.guidance = parse_guidance_kind(c.guidance);
  options.runs = c.runs;
  options.parallel = c.parallel;
  options.fewshot_budget_tokens = c.fewshot_budget;
  if (c.runs < 1) config_error("--runs must be at least 1");
  if (c.parallel < 1) config_error("--parallel must be at least 1");
  if (options.guidance == GuidanceKind::heuristics) need(c.pool, "--pool");
  if (options.guidance == GuidanceKind::fewshot_trajectories) need(c.trajectories, "--trajectories");
  if (options.guidance != GuidanceKind::none) options.retrieval = retrieval_config(c);

  auto rt = make_runtime(c, true);
  const std::vector<Scenario> scenarios = load_checked_scenarios(c, rt->env);
  const auto prices = load_prices(c);
  if (!c.pool.empty()) need_path(c.pool, "--pool");
  if (!c.trajectories.empty()) need_path(c.trajectories, "--trajectories");
  const Pool pool = c.pool.empty() ? Pool{} : Pool::load(c.pool);
  if (!c.trajectories.empty()) options.fewshot_source = load_trajectories(c.trajectories);

  Services services = rt->services(c);
  const EvaluateResult result = evaluate(scenarios, pool, options, services);

  const auto dir = output_dir(c);
  write_run_matrix_csv(dir / "run_matrix.csv", result.matrix);
  write_json(dir / "metrics.json", metrics_summary(result.matrix));
  json log = json::array();
  for (const ScenarioLog& s : result.log) {
    json entry{{"scenario_id", s.scenario_id},
               {"retrieval_invoked", s.retrieval_invoked},
               {"guidance", to_string(s.guidance.kind)},
               {"guidance_items", s.guidance.items.size()},
               {"guidance_tokens", s.guidance.token_estimate},
               {"turns", s.turns}};
    if (s.retrieval_invoked) entry["retrieval"] = retrieval_json(s.retrieval);
    log.push_back(std::move(entry));
  }
  write_json(dir / "retrieval_log.json", log);

  print_metrics(out, result.matrix);
  write_usage_and_cost(dir, result.usage, result.average_turns, prices, out);
  return kExitOk;
}

int cmd_iterative(const RunConfig& c, std::ostream& out, std::ostream& err) {
  IterativeConfig cfg;
  cfg.num_batches = c.batches;
  cfg.batch_size = c.batch_size;
  cfg.retrieval = retrieval_config(c);
  cfg.shuffle_seed = c.shuffle_seed;
  cfg.accumulate.use_env_reward = !c.no_reward;
  cfg.validate();
  need(c.pool, "--pool");

  auto rt = make_runtime(c, true);
  const std::vector<Scenario> scenarios = load_checked_scenarios(c, rt->env);
  const auto prices = load_prices(c);
  if (c.parallel > 1) err << "note: --parallel is ignored in iterative mode\n";

  Services services = rt->services(c);
  const IterativeResult result = iterative_erl(scenarios, cfg, services);

  const auto dir = output_dir(c);
  result.pool.save(c.pool);
  if (!result.source.scenario_ids.empty()) {
    write_run_matrix_csv(dir / "run_matrix.csv", result.source);
    write_json(dir / "metrics.json", metrics_summary(result.source));
  }
  save_trajectories(dir / "trajectories.jsonl", result.trajectories);
  json log = json::array();
  for (const IterationLog& l : result.log) {
    log.push_back({{"scenario_id", l.scenario_id},
                   {"batch", l.batch},
                   {"pool_ids_at_retrieval", l.pool_ids_at_retrieval},
                   {"retrieved_ids", l.retrieved_ids},
                   {"guided", l.guided},
                   {"pool_size_after", l.pool_size_after}});
  }
  write_json(dir / "iteration_log.json", log);
  const int status = report_skipped(err, result.skipped);

  out << "pool: " << result.pool.size() << " heuristics in " << c.pool << '\n';
  for (const IterationLog& l : result.log) {
    out << "batch " << l.batch << "  " << pad(l.scenario_id, 10) << (l.guided ? "guided   " : "unguided ")
        << "pool " << l.pool_ids_at_retrieval.size() << " -> " << l.pool_size_after << '\n';
  }
  if (!result.source.scenario_ids.empty()) print_metrics(out, result.source);
  write_usage_and_cost(dir, usage_report(rt->ledger), std::nullopt, prices, out);
  return status;
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream&) {
  need_path(c.usage, "--usage");
  need(c.prices, "--prices");
  const auto prices = load_prices(c);
  std::ifstream in(c.usage);
  if (!in) config_error("cannot read " + c.usage);
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) config_error(c.usage + " is not valid JSON");
  UsageReport usage;
  try {
    for (const auto& [label, t] : j.at("steps").items()) usage.steps[parse_step_label(label)] = totals_from_json(t);
    usage.total = totals_from_json(j.at("total"));
  } catch (const json::exception& e) {
    config_error(c.usage + ": " + e.what());
  }
  for (StepLabel s : {StepLabel::generation, StepLabel::retrieval, StepLabel::rollout, StepLabel::self_assessment}) {
    usage.steps.try_emplace(s);
  }
  std::optional<double> avg;
  if (j.contains("average_turns")) avg = j["average_turns"].get<double>();
  const CostReport report = cost_report(usage, *prices, avg);
  print_cost(out, report);
  if (!c.output_dir.empty() && c.output_dir != "-") write_json(output_dir(c) / "cost_report.json", report.to_json());
  return kExitOk;
}

bool is_config_problem(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
         dynamic_cast<const FormatError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
         dynamic_cast<const TemplateError*>(&e) || dynamic_cast<const MissingPrice*>(&e) ||
         dynamic_cast<const EmptyPool*>(&e) || dynamic_cast<const DuplicateScenarioId*>(&e) ||
         dynamic_cast<const InvalidHeuristic*>(&e);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Experiential reflective learning: accumulate heuristics, retrieve them, evaluate agents."};
  app.name("erl");
  app.set_config("--config", "", "TOML or INI file with any of the flags below");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--universe-dir", c.universe_dir, "Directory of universe JSON files");
  app.add_option("--scenarios", c.scenarios, "Scenario file ({\"scenarios\": [...]})");
  app.add_option("--pool", c.pool, "Heuristic pool (JSONL)");
  app.add_option("--backend", c.backend, "live or scripted")->capture_default_str();
  app.add_option("--script", c.script, "Scripted backend file");
  app.add_option("--method", c.method, "Retrieval method: llm, embedding, random")->capture_default_str();
  app.add_option("--k", c.k, "Heuristics to retrieve")->capture_default_str();
  app.add_option("--filter", c.filter, "Outcome filter: all, failures, successes")->capture_default_str();
  app.add_option("--guidance", c.guidance, "none, heuristics or fewshot")->capture_default_str();
  app.add_option("--runs", c.runs, "Runs per scenario")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for random retrieval");
  app.add_option("--shuffle-seed", c.shuffle_seed, "Shuffle the task stream in iterative mode");
  app.add_option("--prices", c.prices, "Price table JSON (dollars per million tokens)");
  app.add_option("--output-dir", c.output_dir, "Where metrics, logs and reports go")->capture_default_str();
  app.add_flag("--no-reward", c.no_reward, "Self-assess outcomes instead of using the verifier");
  app.add_option("--parallel", c.parallel, "Concurrent scenarios in eval")->capture_default_str();
  app.add_option("--templates", c.templates, "Prompt template directory");
  app.add_option("--base-url", c.base_url, "Chat-completions base URL")->capture_default_str();
  app.add_option("--model", c.model, "Chat model")->capture_default_str();
  app.add_option("--embed-model", c.embed_model, "Embedding model")->capture_default_str();
  app.add_option("--max-turns", c.max_turns, "Turn budget per episode")->capture_default_str();
  app.add_option("--trajectories", c.trajectories, "Trajectory JSONL for few-shot guidance");
  app.add_option("--fewshot-budget", c.fewshot_budget, "Token budget for few-shot guidance")->capture_default_str();
  app.add_option("--batches", c.batches, "Iterative mode: number of batches")->capture_default_str();
  app.add_option("--batch-size", c.batch_size, "Iterative mode: tasks per batch")->capture_default_str();

  auto* accumulate_cmd = app.add_subcommand("accumulate", "Run source scenarios once and reflect into the pool");
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Rank pool heuristics for a task");
  retrieve_cmd->add_option("--task", c.task, "Task text");
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and print its trajectory");
  run_cmd->add_option("--scenario", c.scenario, "Scenario id");
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a scenario suite");
  auto* iterative_cmd = app.add_subcommand("iterative", "Interleave execution and reflection batch by batch");
  auto* report_cmd = app.add_subcommand("report", "Cost table from a usage.json");
  report_cmd->add_option("--usage", c.usage, "usage.json written by accumulate, eval or iterative");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*accumulate_cmd) return cmd_accumulate(c, out, err);
    if (*retrieve_cmd) return cmd_retrieve(c, out, err);
    if (*run_cmd) return cmd_run(c, out, err);
    if (*eval_cmd) return cmd_eval(c, out, err);
    if (*iterative_cmd) return cmd_iterative(c, out, err);
    if (*report_cmd) return cmd_report(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return is_config_problem(e) ? kExitConfig : kExitBackend;
  }
  return kExitConfig;
}

}  // namespace erl
