#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "erl/errors.hpp"
#include "erl/evaluation.hpp"
#include "helpers.hpp"

using namespace erl;
using erl::test::source_path;
using nlohmann::json;

namespace {

constexpr Outcome S = Outcome::success;
constexpr Outcome F = Outcome::failure;

RunMatrix matrix(std::vector<std::vector<Outcome>> rows, std::vector<Split> splits = {}) {
  RunMatrix m;
  m.runs = rows.empty() ? 1 : static_cast<int>(rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.scenario_ids.push_back("X" + std::to_string(i));
  m.outcomes = std::move(rows);
  m.splits = std::move(splits);
  return m;
}

// Demo fixture wiring: shipped universes, templates and one script file.
struct DemoRig {
  Environment env = Environment::load_dir(source_path("data/universes"));
  PromptTemplates templates = erl::test::templates();
  ScriptedBackend chat;
  HashEmbedder embedder;
  UsageLedger ledger;
  std::unique_ptr<Gateway> gateway;
  Services services;

  explicit DemoRig(const std::string& script) : chat(ScriptedBackend::load(source_path("data/demo/" + script))) {
    gateway = std::make_unique<Gateway>(chat, embedder, ledger);
    services.env = &env;
    services.gateway = gateway.get();
    services.templates = &templates;
    services.clock = [](const Scenario&) { return parse_timestamp("2024-10-15T09:00:00Z"); };
  }
};

std::vector<Scenario> source_scenarios() { return load_scenarios(source_path("data/demo/source_scenarios.json")); }
std::vector<Scenario> test_scenarios() { return load_scenarios(source_path("data/demo/test_scenarios.json")); }

Pool demo_pool() {
  DemoRig rig("accumulate.script.json");
  const auto scenarios = source_scenarios();
  return accumulate(scenarios, rig.services).pool;
}

// Four scenarios over one small universe, each solved by a single final answer.
struct TinyRig {
  Environment env{std::vector<Universe>{universe_from_json(json::parse(R"({
      "universe_id": "ev", "now": "2024-10-15 09:00:00",
      "contacts": [{"name": "Ana Lima", "email": "ana@ev.example.com", "age": 30, "city": "Porto"}],
      "calendar_events": [], "emails": []})"))}};
  PromptTemplates templates = erl::test::templates();
  erl::test::ScriptedRig rig;
  Services services;
  std::vector<Scenario> scenarios;

  TinyRig() {
    services.env = &env;
    services.gateway = &rig.gateway;
    services.templates = &templates;
    for (int i = 0; i < 4; ++i) {
      scenarios.push_back(scenario_from_json(json{{"scenario_id", "Q" + std::to_string(i)},
                                                  {"universe_id", "ev"},
                                                  {"split", i % 2 == 0 ? "search" : "execution"},
                                                  {"task", "Where does Ana live? (" + std::to_string(i) + ")"},
                                                  {"checks", {{{"kind", "answer_contains"},
                                                               {"parameters", {{"substring", "Porto"}}}}}}}));
    }
  }
};

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("metrics on a worked example") {
  const RunMatrix m = matrix({{S, F, S}, {F, F, F}, {S, S, S}});
  CHECK(success_rate(m) == doctest::Approx(5.0 / 9.0));
  CHECK(pass_at_k(m) == doctest::Approx(2.0 / 3.0));
  CHECK(pass_hat_k(m) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("metrics edge cases") {
  CHECK(success_rate(matrix({{S}})) == 1.0);
  CHECK(pass_hat_k(matrix({{S, S}, {S, F}})) == 0.5);
  RunMatrix empty;
  empty.runs = 3;
  CHECK(success_rate(empty) == 0.0);
  CHECK(pass_at_k(empty) == 0.0);
  RunMatrix ragged = matrix({{S, F}, {S}});
  CHECK_THROWS_AS(ragged.validate(), PreconditionError);
  CHECK_THROWS_AS(success_rate(ragged), PreconditionError);
}

TEST_CASE("metrics agree with a direct count on random matrices") {
  std::mt19937 rng(1000);
  for (int t = 0; t < 1000; ++t) {
    const int rows = 1 + static_cast<int>(rng() % 12);
    const int runs = 1 + static_cast<int>(rng() % 5);
    const double p = (rng() % 101) / 100.0;
    std::bernoulli_distribution coin(p);
    std::vector<std::vector<Outcome>> cells(rows);
    int wins = 0, any = 0, all = 0;
    for (auto& row : cells) {
      int row_wins = 0;
      for (int r = 0; r < runs; ++r) {
        const bool w = coin(rng);
        row.push_back(w ? S : F);
        row_wins += w;
      }
      wins += row_wins;
      any += row_wins > 0;
      all += row_wins == runs;
    }
    const RunMatrix m = matrix(cells);
    CHECK(success_rate(m) == doctest::Approx(static_cast<double>(wins) / (rows * runs)));
    CHECK(pass_at_k(m) == doctest::Approx(static_cast<double>(any) / rows));
    CHECK(pass_hat_k(m) == doctest::Approx(static_cast<double>(all) / rows));
    CHECK(pass_hat_k(m) <= success_rate(m) + 1e-12);
    CHECK(success_rate(m) <= pass_at_k(m) + 1e-12);
  }
}

TEST_CASE("metrics summary and csv") {
  const RunMatrix m =
      matrix({{S, F, S}, {F, F, F}, {S, S, S}}, {Split::execution, Split::search, Split::search});
  const json j = metrics_summary(m);
  CHECK(j["runs"] == 3);
  CHECK(j["overall"]["scenarios"] == 3);
  CHECK(j["overall"].contains("pass@3"));
  CHECK(j["overall"].contains("pass^3"));
  CHECK(j["execution"]["sr"].get<double>() == doctest::Approx(2.0 / 3.0));
  CHECK(j["search"]["pass^3"].get<double>() == doctest::Approx(0.5));

  erl::test::TempDir dir;
  write_run_matrix_csv(dir / "m.csv", m);
  const std::string csv = erl::test::slurp(dir / "m.csv");
  CHECK(csv.rfind("scenario_id,run,outcome\nX0,0,success\nX0,1,failure\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("accumulate builds one heuristic per scenario") {
  TinyRig t;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "Q" + std::to_string(i);
    t.rig.chat.push_text("rollout/" + id, i == 1 ? "FINAL ANSWER: Lyon" : "FINAL ANSWER: Porto");
    t.rig.chat.push_text("reflect/" + id, "Analysis: lesson " + id + "\nTrigger: t\nAction: a");
  }
  const AccumulateResult r = accumulate(t.scenarios, t.services);
  CHECK(r.pool.size() == 4);
  CHECK(r.skipped.empty());
  CHECK(r.source.outcomes == std::vector<std::vector<Outcome>>{{S}, {F}, {S}, {S}});
  CHECK(r.pool.find("Q1")->outcome == F);
  CHECK(r.pool.find("Q1")->outcome_source == OutcomeSource::env_reward);
  CHECK(r.trajectories.size() == 4);
  const UsageReport u = usage_report(t.rig.ledger);
  CHECK(u.at(StepLabel::rollout).calls == 4);
  CHECK(u.at(StepLabel::generation).calls == 4);
  CHECK(u.at(StepLabel::retrieval).calls == 0);
}

TEST_CASE("accumulate skips a scenario whose reflection is empty") {
  TinyRig t;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "Q" + std::to_string(i);
    t.rig.chat.push_text("rollout/" + id, "FINAL ANSWER: Porto");
    t.rig.chat.push_text("reflect/" + id, i == 2 ? "   \n" : "Analysis: fine");
  }
  const AccumulateResult r = accumulate(t.scenarios, t.services);
  CHECK(r.pool.size() == 3);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].scenario_id == "Q2");
  CHECK_FALSE(r.skipped[0].infrastructure);
  CHECK_FALSE(r.pool.contains("Q2"));
}

TEST_CASE("accumulate keeps going past a backend error and flags it") {
  TinyRig t;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "Q" + std::to_string(i);
    if (i == 1) continue;  // no rollout scripted for Q1
    t.rig.chat.push_text("rollout/" + id, "FINAL ANSWER: Porto");
    t.rig.chat.push_text("reflect/" + id, "Analysis: fine");
  }
  const AccumulateResult r = accumulate(t.scenarios, t.services);
  CHECK(r.pool.size() == 3);
  REQUIRE(r.skipped.size() == 1);
  CHECK(r.skipped[0].scenario_id == "Q1");
  CHECK(r.skipped[0].infrastructure);
}

TEST_CASE("accumulate without environment reward") {
  TinyRig t;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "Q" + std::to_string(i);
    t.rig.chat.push_text("rollout/" + id, "FINAL ANSWER: Porto");
    t.rig.chat.push_text("assess/" + id, i == 0 ? "VERDICT: FAILURE" : "VERDICT: SUCCESS");
    t.rig.chat.push_text("reflect/" + id, "Analysis: fine");
  }
  AccumulateOptions opts;
  opts.use_env_reward = false;
  const AccumulateResult r = accumulate(t.scenarios, t.services, opts);
  REQUIRE(r.pool.size() == 4);
  for (const auto& h : r.pool.entries()) CHECK(h.outcome_source == OutcomeSource::self_assessed);
  CHECK(r.pool.find("Q0")->outcome == F);
  CHECK(r.pool.find("Q3")->outcome == S);
  CHECK(usage_report(t.rig.ledger).at(StepLabel::self_assessment).calls == 4);
}

TEST_CASE("unguided evaluation never retrieves") {
  TinyRig t;
  for (int i = 0; i < 4; ++i) {
    for (int r = 0; r < 3; ++r) t.rig.chat.push_text("rollout/Q" + std::to_string(i), "FINAL ANSWER: Porto");
  }
  EvaluateOptions opts;
  opts.runs = 3;
  const EvaluateResult r = evaluate(t.scenarios, erl::test::make_pool(5), opts, t.services);
  CHECK(r.usage.at(StepLabel::retrieval).calls == 0);
  CHECK(r.usage.at(StepLabel::rollout).calls == 12);
  for (const auto& log : r.log) CHECK_FALSE(log.retrieval_invoked);
  for (const auto& row : r.matrix.outcomes) CHECK(row.size() == 3);
  CHECK(success_rate(r.matrix) == 1.0);
  CHECK(r.average_turns == 1.0);
}

TEST_CASE("demo: guided evaluation beats the baseline") {
  const Pool pool = demo_pool();
  REQUIRE(pool.size() == 6);
  const auto tests = test_scenarios();

  DemoRig base("baseline.script.json");
  EvaluateOptions none;
  none.runs = 3;
  const EvaluateResult b = evaluate(tests, pool, none, base.services);

  DemoRig erl("erl.script.json");
  EvaluateOptions guided = none;
  guided.guidance = GuidanceKind::heuristics;
  guided.retrieval.k = 3;
  const EvaluateResult g = evaluate(tests, pool, guided, erl.services);

  CHECK(b.matrix.runs == 3);
  CHECK(g.matrix.runs == 3);
  CHECK(success_rate(b.matrix) == doctest::Approx(5.0 / 18.0));
  CHECK(success_rate(g.matrix) == doctest::Approx(15.0 / 18.0));
  CHECK(success_rate(g.matrix) > success_rate(b.matrix));
  CHECK(pass_at_k(g.matrix) >= pass_at_k(b.matrix));
  CHECK(pass_hat_k(g.matrix) >= pass_hat_k(b.matrix));
  CHECK(g.usage.at(StepLabel::retrieval).calls == 6);
  for (const auto& log : g.log) {
    CHECK(log.retrieval_invoked);
    CHECK(log.retrieval.ranked.size() <= 3);
    CHECK(check_invariants(log.retrieval, pool).empty());
  }
}

TEST_CASE("demo: evaluation is reproducible and parallel-safe") {
  const Pool pool = demo_pool();
  const auto tests = test_scenarios();
  auto run = [&](int parallel) {
    DemoRig rig("erl.script.json");
    EvaluateOptions o;
    o.runs = 3;
    o.guidance = GuidanceKind::heuristics;
    o.retrieval.k = 3;
    o.parallel = parallel;
    return evaluate(tests, pool, o, rig.services);
  };
  const EvaluateResult a = run(1), b = run(1), c = run(4);
  CHECK(a.matrix.outcomes == b.matrix.outcomes);
  CHECK(a.matrix.outcomes == c.matrix.outcomes);
  CHECK(a.usage.total == c.usage.total);
  CHECK(a.average_turns == c.average_turns);
}

TEST_CASE("infrastructure errors abort an evaluation") {
  TinyRig t;  // nothing scripted
  EvaluateOptions opts;
  opts.runs = 1;
  CHECK_THROWS_AS(evaluate(t.scenarios, Pool{}, opts, t.services), BackendError);
  opts.parallel = 3;
  CHECK_THROWS_AS(evaluate(t.scenarios, Pool{}, opts, t.services), BackendError);
  opts.runs = 0;
  CHECK_THROWS_AS(evaluate(t.scenarios, Pool{}, opts, t.services), ConfigError);
}

TEST_CASE("few-shot guidance without a pool takes the first trajectories") {
  TinyRig t;
  for (int i = 0; i < 4; ++i) t.rig.chat.push_text("rollout/Q" + std::to_string(i), "FINAL ANSWER: Porto");
  EvaluateOptions opts;
  opts.runs = 1;
  opts.guidance = GuidanceKind::fewshot_trajectories;
  opts.retrieval.k = 2;
  for (int i = 0; i < 3; ++i) {
    TrajectoryRecord r{"P" + std::to_string(i), "past task " + std::to_string(i), S, {}};
    r.trajectory.steps.push_back({"done", std::nullopt, std::nullopt});
    r.trajectory.final_answer = "x";
    opts.fewshot_source.push_back(r);
  }
  const EvaluateResult r = evaluate(t.scenarios, Pool{}, opts, t.services);
  CHECK(r.log[0].guidance.items.size() == 2);
  CHECK(t.rig.chat.calls()[0].request_text.find(kExamplesBegin) != std::string::npos);
  CHECK(t.rig.chat.calls()[0].request_text.find("past task 2") == std::string::npos);
}

TEST_CASE("demo: iterative mode starts cold and grows by one each task") {
  DemoRig rig("iterative.script.json");
  const auto scenarios = source_scenarios();
  IterativeConfig cfg;
  cfg.num_batches = 3;
  cfg.batch_size = 2;
  const IterativeResult r = iterative_erl(scenarios, cfg, rig.services);
  CHECK(r.skipped.empty());
  CHECK(r.pool.size() == 6);
  REQUIRE(r.log.size() == 6);
  CHECK(r.log[0].pool_ids_at_retrieval.empty());
  CHECK_FALSE(r.log[0].guided);
  CHECK(r.log[0].retrieved_ids.empty());
  for (std::size_t n = 0; n < r.log.size(); ++n) {
    CHECK(r.log[n].batch == static_cast<int>(n / 2));
    CHECK(r.log[n].pool_size_after == n + 1);
    if (n > 0) {
      // Before task n the pool is exactly the earlier tasks' heuristics.
      std::vector<std::string> expected;
      for (std::size_t m = 0; m < n; ++m) expected.push_back(r.log[m].scenario_id);
      CHECK(r.log[n].pool_ids_at_retrieval == expected);
      CHECK(r.log[n].guided);
      for (const auto& id : r.log[n].retrieved_ids) {
        CHECK(std::find(expected.begin(), expected.end(), id) != expected.end());
      }
    }
  }
}

TEST_CASE("iterative mode respects the task budget and shuffle seed") {
  IterativeConfig cfg;
  cfg.num_batches = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  auto order = [](std::uint64_t seed) {
    TinyRig t;
    for (int i = 0; i < 4; ++i) {
      const std::string id = "Q" + std::to_string(i);
      t.rig.chat.push_text("rollout/" + id, "FINAL ANSWER: Porto");
      t.rig.chat.push_text("reflect/" + id, "Analysis: ok");
      t.rig.chat.push_text("retrieve/" + id, R"({"Q0": ["r", 50], "Q1": ["r", 50], "Q2": ["r", 50], "Q3": ["r", 50]})");
    }
    IterativeConfig c;
    c.num_batches = 1;
    c.batch_size = 3;
    c.shuffle_seed = seed;
    std::vector<std::string> ids;
    for (const auto& l : iterative_erl(t.scenarios, c, t.services).log) ids.push_back(l.scenario_id);
    return ids;
  };
  const auto a = order(11), b = order(11);
  CHECK(a == b);
  CHECK(a.size() == 3);
}

TEST_CASE("cost of nothing is zero") {
  const PriceTable prices{1.25, 0.125, 10.0};
  const CostReport r = cost_report(usage_report(std::span<const Usage>{}), prices);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row.cost == 0.0);
    CHECK(row.cached_percent == 0.0);
  }
}

TEST_CASE("a million input tokens at a dollar") {
  const PriceTable prices{1.0, 0.1, 2.0};
  const std::vector<Usage> usage{{1'000'000, 0, 0, StepLabel::rollout}};
  const CostReport r = cost_report(usage_report(usage), prices);
  CHECK(r.total().cost == doctest::Approx(1.00));
  CHECK(r.rows[2].step == "Scenario rollout");
  CHECK(r.rows[2].cost == doctest::Approx(1.00));
}

TEST_CASE("cost rows agree with a direct computation") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::int64_t> tok(0, 2'000'000);
  std::uniform_real_distribution<double> rate(0.0, 20.0);
  for (int t = 0; t < 200; ++t) {
    const PriceTable prices{rate(rng), rate(rng) / 10, rate(rng)};
    std::vector<Usage> usage;
    long double expect_total = 0;
    for (int i = 0; i < 20; ++i) {
      const std::int64_t p = tok(rng), c = tok(rng) / 5;
      const std::int64_t cached = p / (2 + i % 3);
      usage.push_back({p, c, cached, static_cast<StepLabel>(i % 4)});
      expect_total += ((p - cached) * static_cast<long double>(*prices.input_per_million) +
                       cached * static_cast<long double>(*prices.cached_input_per_million) +
                       c * static_cast<long double>(*prices.output_per_million)) /
                      1e6L;
    }
    const CostReport r = cost_report(usage_report(usage), prices);
    CHECK(r.total().cost == doctest::Approx(static_cast<double>(expect_total)).epsilon(1e-9));
    double sum = 0;
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) sum += r.rows[i].cost;
    CHECK(sum == doctest::Approx(r.total().cost).epsilon(1e-9));
  }
}

TEST_CASE("cost report layout") {
  const PriceTable prices{1.0, 0.5, 4.0};
  std::vector<Usage> usage{{100, 10, 50, StepLabel::generation}, {200, 20, 0, StepLabel::retrieval}};
  CostReport r = cost_report(usage_report(usage), prices, 7.5);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].step == "Heuristic generation");
  CHECK(r.rows[1].step == "Heuristic retrieval");
  CHECK(r.rows[2].step == "Scenario rollout");
  CHECK(r.rows[3].step == "Total");
  CHECK(r.rows[0].cached_percent == doctest::Approx(50.0));
  CHECK(r.total().input_tokens == 300);
  CHECK(r.to_json()["average_turns"] == 7.5);

  usage.push_back({10, 1, 0, StepLabel::self_assessment});
  r = cost_report(usage_report(usage), prices);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.rows[3].step == "Self-assessment");

  CHECK_THROWS_AS(cost_report(usage_report(usage), PriceTable{1.0, std::nullopt, 1.0}), MissingPrice);
  CHECK_THROWS_AS(PriceTable::from_json(json{{"input_per_million", "cheap"}}), ConfigError);
  CHECK_FALSE(PriceTable::from_json(json::object()).output_per_million);
}

}  // TEST_SUITE
