#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "erl/outcome.hpp"

namespace erl {

using Timestamp = std::chrono::sys_seconds;

// A lesson distilled from one task experience.
struct Heuristic {
  std::string scenario_id;
  std::string task;
  Outcome outcome = Outcome::failure;
  OutcomeSource outcome_source = OutcomeSource::env_reward;
  std::string analysis;
  std::string guideline_trigger;
  std::string guideline_action;
  std::string raw_text;  // full reflection output, verbatim
  Timestamp created_at{};

  bool operator==(const Heuristic&) const = default;
};

// Throws InvalidHeuristic when scenario_id, analysis or raw_text is empty.
void validate(const Heuristic& h);

nlohmann::json to_json(const Heuristic& h);
// Throws erl::Error describing the first bad or missing field.
Heuristic heuristic_from_json(const nlohmann::json& j);

std::string format_timestamp(Timestamp t);          // 2024-10-15T09:00:00Z
Timestamp parse_timestamp(std::string_view text);   // throws erl::Error

enum class OutcomeFilter { all, failures_only, successes_only };

std::string_view to_string(OutcomeFilter f);
OutcomeFilter parse_outcome_filter(std::string_view text);

// Ordered, duplicate-free collection of heuristics. Insertion order is the
// tie-breaker everywhere downstream, so it survives save/load unchanged.
class Pool {
 public:
  Pool() = default;

  // Throws DuplicateScenarioId or InvalidHeuristic; the pool is unchanged on throw.
  void append(Heuristic h);

  Pool filtered(OutcomeFilter f) const;

  const std::vector<Heuristic>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool contains(std::string_view scenario_id) const;
  const Heuristic* find(std::string_view scenario_id) const;

  const std::optional<std::filesystem::path>& origin() const { return origin_; }

  // JSONL, one heuristic per line. save() replaces the file atomically.
  void save(const std::filesystem::path& path) const;
  static Pool load(const std::filesystem::path& path);

  bool operator==(const Pool& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Heuristic> entries_;
  std::unordered_set<std::string> ids_;
  std::optional<std::filesystem::path> origin_;
};

// Appends one record to a pool file without rewriting it.
void append_record(const std::filesystem::path& path, const Heuristic& h);

using PoolSnapshot = std::shared_ptr<const Pool>;

// Single-writer holder. Readers take immutable snapshots; append publishes a
// new snapshot and, when a backing file is set, appends the record to it.
class PoolStore {
 public:
  explicit PoolStore(Pool initial = {}, std::optional<std::filesystem::path> file = std::nullopt);

  PoolSnapshot snapshot() const;
  void append(Heuristic h);
  std::size_t size() const { return snapshot()->size(); }

 private:
  mutable std::mutex mu_;
  PoolSnapshot current_;
  std::optional<std::filesystem::path> file_;
};

}  // namespace erl
