#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "erl/heuristic_pool.hpp"
#include "erl/llm_gateway.hpp"
#include "erl/prompt_template.hpp"

#ifndef ERL_SOURCE_DIR
#define ERL_SOURCE_DIR "."
#endif

namespace erl::test {

inline std::filesystem::path source_path(const std::string& rel) { return std::filesystem::path(ERL_SOURCE_DIR) / rel; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("erl_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Heuristic make_heuristic(const std::string& id, Outcome outcome = Outcome::failure,
                                const std::string& task = "") {
  Heuristic h;
  h.scenario_id = id;
  h.task = task.empty() ? "task for " + id : task;
  h.outcome = outcome;
  h.analysis = "analysis of " + id;
  h.guideline_trigger = "when " + id;
  h.guideline_action = "do " + id;
  h.raw_text = "Analysis: analysis of " + id + "\nTrigger: when " + id + "\nAction: do " + id;
  h.created_at = parse_timestamp("2024-10-15T09:00:00Z");
  return h;
}

inline Pool make_pool(int n, const std::string& prefix = "H") {
  Pool p;
  for (int i = 0; i < n; ++i) {
    p.append(make_heuristic(prefix + std::to_string(i), i % 3 == 0 ? Outcome::success : Outcome::failure));
  }
  return p;
}

inline PromptTemplates templates() { return PromptTemplates::load(source_path("templates")); }

// Gateway bundle over a scripted backend and a hash embedder.
struct ScriptedRig {
  ScriptedBackend chat;
  HashEmbedder embedder;
  UsageLedger ledger;
  Gateway gateway{chat, embedder, ledger};
};

}  // namespace erl::test
