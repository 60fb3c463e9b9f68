#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "erl/cli.hpp"
#include "helpers.hpp"

using namespace erl;
using erl::test::slurp;
using erl::test::source_path;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "erl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string demo(const std::string& rel) { return source_path("data/" + rel).string(); }

std::vector<std::string> common(const erl::test::TempDir& dir, const std::string& script) {
  return {"--universe-dir", demo("universes"), "--backend", "scripted", "--script", demo("demo/" + script),
          "--output-dir", (dir / "out").string()};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and unknown flags") {
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"eval", "--no-such-flag"}).code == 2);
  CHECK(cli({}).code == 2);
}

TEST_CASE("accumulate writes the pool and reports") {
  erl::test::TempDir dir;
  const std::string pool = (dir / "pool.jsonl").string();
  const CliRun r = cli(concat(common(dir, "accumulate.script.json"),
                              {"accumulate", "--scenarios", demo("demo/source_scenarios.json"), "--pool", pool}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(Pool::load(pool).size() == 6);
  CHECK(std::filesystem::exists(dir / "out/run_matrix.csv"));
  CHECK(std::filesystem::exists(dir / "out/metrics.json"));
  CHECK(std::filesystem::exists(dir / "out/trajectories.jsonl"));
  CHECK(std::filesystem::exists(dir / "out/usage.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "out/cost_report.json"));
  CHECK(r.out.find("pool: 6 heuristics") != std::string::npos);
}

TEST_CASE("config errors exit 2 and write nothing") {
  erl::test::TempDir dir;
  const std::string pool = (dir / "pool.jsonl").string();
  SUBCASE("missing script") {
    const CliRun r = cli({"--universe-dir", demo("universes"), "--output-dir", (dir / "out").string(), "accumulate",
                          "--scenarios", demo("demo/source_scenarios.json"), "--pool", pool});
    CHECK(r.code == 2);
  }
  SUBCASE("missing scenarios file") {
    const CliRun r = cli(concat(common(dir, "accumulate.script.json"),
                                {"accumulate", "--scenarios", (dir / "nope.json").string(), "--pool", pool}));
    CHECK(r.code == 2);
  }
  SUBCASE("random retrieval without a seed") {
    const CliRun r = cli(concat(common(dir, "erl.script.json"),
                                {"eval", "--scenarios", demo("demo/test_scenarios.json"), "--pool", pool,
                                 "--guidance", "heuristics", "--method", "random"}));
    CHECK(r.code == 2);
  }
  SUBCASE("price table with a missing rate") {
    std::ofstream(dir / "prices.json") << R"({"input_per_million": 1.0})";
    const CliRun r = cli(concat(common(dir, "baseline.script.json"),
                                {"eval", "--scenarios", demo("demo/test_scenarios.json"), "--prices",
                                 (dir / "prices.json").string()}));
    CHECK(r.code == 2);
  }
  SUBCASE("live backend without a key") {
    if (std::getenv("ERL_API_KEY") == nullptr) {
      const CliRun r = cli({"--universe-dir", demo("universes"), "--backend", "live", "--output-dir",
                            (dir / "out").string(), "eval", "--scenarios", demo("demo/test_scenarios.json")});
      CHECK(r.code == 2);
    }
  }
  CHECK_FALSE(std::filesystem::exists(dir / "out"));
  CHECK_FALSE(std::filesystem::exists(pool));
}

TEST_CASE("an exhausted script is an infrastructure failure") {
  erl::test::TempDir dir;
  std::ofstream(dir / "empty.json") << R"({"sessions": {}})";
  const CliRun r = cli({"--universe-dir", demo("universes"), "--backend", "scripted", "--script",
                        (dir / "empty.json").string(), "--output-dir", (dir / "out").string(), "eval", "--scenarios",
                        demo("demo/test_scenarios.json")});
  CHECK(r.code == 3);
  CHECK(r.err.find("no responses left") != std::string::npos);

  const std::string pool = (dir / "pool.jsonl").string();
  const CliRun a = cli({"--universe-dir", demo("universes"), "--backend", "scripted", "--script",
                        (dir / "empty.json").string(), "--output-dir", (dir / "acc").string(), "accumulate",
                        "--scenarios", demo("demo/source_scenarios.json"), "--pool", pool});
  CHECK(a.code == 3);
  CHECK(a.err.find("skipped S1") != std::string::npos);
  CHECK(std::filesystem::exists(pool));
}

TEST_CASE("retrieve prints at most k entries") {
  erl::test::TempDir dir;
  erl::test::make_pool(10).save(dir / "pool.jsonl");
  std::ofstream(dir / "script.json") << R"({"sessions": {}})";
  const std::vector<std::string> base{"--backend", "scripted", "--script", (dir / "script.json").string(),
                                      "--pool", (dir / "pool.jsonl").string(), "--k", "3"};
  const CliRun r = cli(concat(base, {"--method", "embedding", "retrieve", "--task", "task for H4"}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("returned: 3") != std::string::npos);
  CHECK(r.out.find("1. H4") != std::string::npos);
  CHECK(r.out.find("\n4. ") == std::string::npos);

  const CliRun a = cli(concat(base, {"--method", "random", "--seed", "7", "retrieve", "--task", "x"}));
  const CliRun b = cli(concat(base, {"--method", "random", "--seed", "7", "retrieve", "--task", "x"}));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("returned: 3") != std::string::npos);
}

TEST_CASE("embedding retrieval needs no script") {
  erl::test::TempDir dir;
  erl::test::make_pool(4).save(dir / "pool.jsonl");
  const std::vector<std::string> base{"--pool", (dir / "pool.jsonl").string(), "--k", "2"};
  const CliRun e = cli(concat(base, {"--method", "embedding", "retrieve", "--task", "task for H1"}));
  REQUIRE_MESSAGE(e.code == 0, e.err);
  CHECK(e.out.find("1. H1") != std::string::npos);
  CHECK(cli(concat(base, {"--method", "llm", "retrieve", "--task", "x"})).code == 2);
  CHECK(cli(concat(base, {"--script", (dir / "missing.json").string(), "retrieve", "--task", "x"})).code == 2);
}

TEST_CASE("retrieve from an empty pool exits 2") {
  erl::test::TempDir dir;
  std::ofstream(dir / "pool.jsonl") << "";
  std::ofstream(dir / "script.json") << R"({"sessions": {}})";
  const CliRun r = cli({"--backend", "scripted", "--script", (dir / "script.json").string(), "--pool",
                        (dir / "pool.jsonl").string(), "retrieve", "--task", "x"});
  CHECK(r.code == 2);
  CHECK(r.err.find("empty pool") != std::string::npos);
}

TEST_CASE("baseline and guided evaluation write comparable metrics") {
  erl::test::TempDir dir;
  const std::string pool = (dir / "pool.jsonl").string();
  REQUIRE(cli(concat(common(dir, "accumulate.script.json"),
                     {"accumulate", "--scenarios", demo("demo/source_scenarios.json"), "--pool", pool}))
              .code == 0);

  std::ofstream(dir / "prices.json")
      << R"({"input_per_million": 0.25, "cached_input_per_million": 0.025, "output_per_million": 2.0})";
  auto eval = [&](const std::string& script, const std::string& out, std::vector<std::string> extra) {
    std::vector<std::string> args{"--universe-dir", demo("universes"), "--backend", "scripted", "--script",
                                  demo("demo/" + script), "--output-dir", (dir / out).string(), "--prices",
                                  (dir / "prices.json").string()};
    args = concat(args, {"eval", "--scenarios", demo("demo/test_scenarios.json"), "--runs", "3"});
    return cli(concat(args, extra));
  };
  const CliRun b = eval("baseline.script.json", "baseline", {});
  const CliRun g = eval("erl.script.json", "erl", {"--pool", pool, "--guidance", "heuristics", "--k", "3"});
  REQUIRE_MESSAGE(b.code == 0, b.err);
  REQUIRE_MESSAGE(g.code == 0, g.err);

  const json mb = json::parse(slurp(dir / "baseline/metrics.json"));
  const json mg = json::parse(slurp(dir / "erl/metrics.json"));
  for (const json* m : {&mb, &mg}) {
    for (const char* key : {"sr", "pass@3", "pass^3"}) CHECK((*m)["overall"].contains(key));
    CHECK((*m)["runs"] == 3);
  }
  CHECK(mg["overall"]["sr"].get<double>() > mb["overall"]["sr"].get<double>());
  CHECK(std::filesystem::exists(dir / "erl/retrieval_log.json"));
  CHECK(std::filesystem::exists(dir / "erl/cost_report.json"));

  const json cost = json::parse(slurp(dir / "erl/cost_report.json"));
  CHECK(cost["rows"].back()["step"] == "Total");
  CHECK(cost.contains("average_turns"));

  const CliRun rep = cli({"--output-dir", (dir / "rep").string(), "--prices", (dir / "prices.json").string(),
                          "report", "--usage", (dir / "erl/usage.json").string()});
  REQUIRE_MESSAGE(rep.code == 0, rep.err);
  CHECK(rep.out.find("Heuristic retrieval") != std::string::npos);
  CHECK(json::parse(slurp(dir / "rep/cost_report.json")) == cost);
}

TEST_CASE("run prints one trajectory") {
  erl::test::TempDir dir;
  const CliRun r = cli(concat(common(dir, "baseline.script.json"),
                              {"run", "--scenarios", demo("demo/test_scenarios.json"), "--scenario", "T4"}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("Step 1") != std::string::npos);
  CHECK(r.out.find("outcome: ") != std::string::npos);
  const CliRun missing = cli(concat(common(dir, "baseline.script.json"),
                                    {"run", "--scenarios", demo("demo/test_scenarios.json"), "--scenario", "T99"}));
  CHECK(missing.code == 2);
}

TEST_CASE("iterative writes its log") {
  erl::test::TempDir dir;
  const std::string pool = (dir / "pool.jsonl").string();
  const CliRun r = cli(concat(common(dir, "iterative.script.json"),
                              {"iterative", "--scenarios", demo("demo/source_scenarios.json"), "--pool", pool,
                               "--batches", "3", "--batch-size", "2"}));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json log = json::parse(slurp(dir / "out/iteration_log.json"));
  REQUIRE(log.size() == 6);
  CHECK(log[0]["guided"] == false);
  CHECK(log[5]["pool_size_after"] == 6);
  CHECK(Pool::load(pool).size() == 6);
}

}  // TEST_SUITE
