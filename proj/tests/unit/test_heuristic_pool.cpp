#include <doctest.h>

#include <thread>

#include "erl/errors.hpp"
#include "erl/heuristic_pool.hpp"
#include "helpers.hpp"

using namespace erl;
using erl::test::make_heuristic;
using erl::test::make_pool;
using erl::test::TempDir;

TEST_SUITE("heuristic_pool") {

TEST_CASE("append to empty pool") {
  Pool p;
  p.append(make_heuristic("S1"));
  CHECK(p.size() == 1);
  CHECK(p.contains("S1"));
  CHECK(p.find("S1")->analysis == "analysis of S1");
}

TEST_CASE("append rejects duplicate scenario id and leaves pool unchanged") {
  Pool p;
  p.append(make_heuristic("S1"));
  Heuristic again = make_heuristic("S1", Outcome::success);
  CHECK_THROWS_AS(p.append(again), DuplicateScenarioId);
  CHECK(p.size() == 1);
  CHECK(p.entries()[0].outcome == Outcome::failure);
}

TEST_CASE("append validates required fields") {
  Pool p;
  Heuristic h = make_heuristic("S1");
  h.analysis.clear();
  CHECK_THROWS_AS(p.append(h), InvalidHeuristic);
  h = make_heuristic("S1");
  h.raw_text.clear();
  CHECK_THROWS_AS(p.append(h), InvalidHeuristic);
  h = make_heuristic("");
  CHECK_THROWS_AS(p.append(h), InvalidHeuristic);
  CHECK(p.empty());
}

TEST_CASE("size grows by one per append") {
  Pool p;
  for (int i = 0; i < 30; ++i) {
    const auto before = p.size();
    p.append(make_heuristic("id" + std::to_string(i)));
    CHECK(p.size() == before + 1);
  }
}

TEST_CASE("one heuristic per source task stays within 244") {
  // 112 execution + 132 search source tasks, one append each.
  Pool p;
  for (int i = 0; i < 112; ++i) p.append(make_heuristic("exec_" + std::to_string(i)));
  for (int i = 0; i < 132; ++i) p.append(make_heuristic("search_" + std::to_string(i)));
  CHECK(p.size() <= 244);
  CHECK(p.size() == 244);
}

TEST_CASE("save then load keeps entries and order") {
  TempDir dir;
  Pool p;
  p.append(make_heuristic("C", Outcome::success));
  p.append(make_heuristic("A"));
  p.append(make_heuristic("B"));
  p.save(dir / "pool.jsonl");
  Pool q = Pool::load(dir / "pool.jsonl");
  CHECK(q == p);
  REQUIRE(q.size() == 3);
  CHECK(q.entries()[0].scenario_id == "C");
  CHECK(q.entries()[2].scenario_id == "B");
  REQUIRE(q.origin().has_value());
  CHECK(*q.origin() == dir / "pool.jsonl");
}

TEST_CASE("round trip survives awkward text") {
  TempDir dir;
  Pool p;
  Heuristic h = make_heuristic("weird");
  h.raw_text = "line one\nline \"two\"\t{braces} \\ backslash\n\xc3\xa9t\xc3\xa9 \xe2\x80\x93 dash";
  h.guideline_trigger = "";
  h.outcome_source = OutcomeSource::self_assessed;
  p.append(h);
  p.save(dir / "p.jsonl");
  CHECK(Pool::load(dir / "p.jsonl") == p);
}

TEST_CASE("load reports the line of a record missing scenario_id") {
  TempDir dir;
  Pool p = make_pool(2);
  p.save(dir / "p.jsonl");
  nlohmann::json bad = to_json(make_heuristic("X"));
  bad.erase("scenario_id");
  {
    std::ofstream out(dir / "p.jsonl", std::ios::app);
    out << bad.dump() << '\n';
  }
  try {
    Pool::load(dir / "p.jsonl");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("load rejects malformed json and duplicate ids") {
  TempDir dir;
  {
    std::ofstream out(dir / "bad.jsonl");
    out << to_json(make_heuristic("A")).dump() << "\n{not json\n";
  }
  CHECK_THROWS_AS(Pool::load(dir / "bad.jsonl"), FormatError);
  {
    std::ofstream out(dir / "dup.jsonl");
    out << to_json(make_heuristic("A")).dump() << "\n" << to_json(make_heuristic("A")).dump() << "\n";
  }
  CHECK_THROWS_AS(Pool::load(dir / "dup.jsonl"), FormatError);
}

TEST_CASE("load of missing file is an IoError") {
  CHECK_THROWS_AS(Pool::load("/nonexistent/dir/pool.jsonl"), IoError);
}

TEST_CASE("load skips blank lines") {
  TempDir dir;
  {
    std::ofstream out(dir / "p.jsonl");
    out << "\n" << to_json(make_heuristic("A")).dump() << "\n   \n" << to_json(make_heuristic("B")).dump() << "\n\n";
  }
  CHECK(Pool::load(dir / "p.jsonl").size() == 2);
}

TEST_CASE("244 record fixture loads completely") {
  const auto path = erl::test::source_path("tests/golden/pool_244.jsonl");
  // Independent count: non-blank lines of the file.
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) ++lines;
  }
  CHECK(lines == 244);
  CHECK(Pool::load(path).size() == lines);
}

TEST_CASE("filter by outcome") {
  Pool p;
  p.append(make_heuristic("s", Outcome::success));
  p.append(make_heuristic("f1", Outcome::failure));
  p.append(make_heuristic("f2", Outcome::failure));
  CHECK(p.filtered(OutcomeFilter::failures_only).size() == 2);
  CHECK(p.filtered(OutcomeFilter::successes_only).size() == 1);
  CHECK(p.filtered(OutcomeFilter::all) == p);
  CHECK(p.size() == 3);
}

TEST_CASE("filters partition random pools") {
  std::mt19937 rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    Pool p;
    for (int i = 0; i < 50; ++i) {
      p.append(make_heuristic("h" + std::to_string(i), rng() % 2 ? Outcome::success : Outcome::failure));
    }
    const Pool f = p.filtered(OutcomeFilter::failures_only);
    const Pool s = p.filtered(OutcomeFilter::successes_only);
    CHECK(f.size() + s.size() == p.size());
    for (const Heuristic& h : f.entries()) {
      CHECK(h.outcome == Outcome::failure);
      CHECK_FALSE(s.contains(h.scenario_id));
    }
    for (const Heuristic& h : s.entries()) CHECK(h.outcome == Outcome::success);
    // Order preserved: ids appear in the same relative order as in p.
    std::size_t cursor = 0;
    for (const Heuristic& h : f.entries()) {
      while (cursor < p.size() && p.entries()[cursor].scenario_id != h.scenario_id) ++cursor;
      CHECK(cursor < p.size());
    }
  }
}

TEST_CASE("outcome filter names") {
  CHECK(parse_outcome_filter("all") == OutcomeFilter::all);
  CHECK(parse_outcome_filter("failures") == OutcomeFilter::failures_only);
  CHECK(parse_outcome_filter("successes_only") == OutcomeFilter::successes_only);
  CHECK_THROWS_AS(parse_outcome_filter("most"), ConfigError);
}

TEST_CASE("timestamps") {
  const Timestamp t = parse_timestamp("2024-10-15T09:00:00Z");
  CHECK(format_timestamp(t) == "2024-10-15T09:00:00Z");
  CHECK_THROWS_AS(parse_timestamp("2024-10-15 09:00:00"), Error);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), Error);
}

TEST_CASE("json record has every documented key") {
  const nlohmann::json j = to_json(make_heuristic("A"));
  for (const char* key : {"scenario_id", "task", "outcome", "outcome_source", "analysis", "guideline_trigger",
                          "guideline_action", "raw_text", "created_at"}) {
    CHECK(j.contains(key));
  }
  CHECK(heuristic_from_json(j) == make_heuristic("A"));
}

TEST_CASE("append_record extends a pool file") {
  TempDir dir;
  make_pool(2).save(dir / "p.jsonl");
  append_record(dir / "p.jsonl", make_heuristic("Z"));
  Pool p = Pool::load(dir / "p.jsonl");
  CHECK(p.size() == 3);
  CHECK(p.entries().back().scenario_id == "Z");
}

TEST_CASE("snapshots are immutable while the store grows") {
  PoolStore store;
  const PoolSnapshot before = store.snapshot();
  store.append(make_heuristic("A"));
  const PoolSnapshot after = store.snapshot();
  CHECK(before->size() == 0);
  CHECK(after->size() == 1);
  CHECK_THROWS_AS(store.append(make_heuristic("A")), DuplicateScenarioId);
  CHECK(store.size() == 1);
}

TEST_CASE("store mirrors appends to its file") {
  TempDir dir;
  PoolStore store({}, dir / "live.jsonl");
  store.append(make_heuristic("A"));
  store.append(make_heuristic("B"));
  CHECK(Pool::load(dir / "live.jsonl") == *store.snapshot());
}

TEST_CASE("concurrent readers see consistent snapshots") {
  PoolStore store;
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!done) {
      PoolSnapshot s = store.snapshot();
      for (std::size_t i = 0; i < s->size(); ++i) {
        if (s->entries()[i].scenario_id != "h" + std::to_string(i)) ++bad;
      }
    }
  });
  for (int i = 0; i < 200; ++i) store.append(make_heuristic("h" + std::to_string(i)));
  done = true;
  reader.join();
  CHECK(bad == 0);
  CHECK(store.size() == 200);
}

}  // TEST_SUITE
