#include "erl/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "erl/errors.hpp"
#include "erl/simd/kernels.hpp"

namespace erl {
namespace {

using nlohmann::json;

// SAX handler collecting the members of a top-level JSON object in document
// order, duplicates included. Trailing text after the object is ignored.
class MemberCollector final : public nlohmann::json_sax<json> {
 public:
  std::vector<std::pair<std::string, json>> members;
  bool complete = false;

  bool null() override { return put(json()); }
  bool boolean(bool v) override { return put(v); }
  bool number_integer(number_integer_t v) override { return put(v); }
  bool number_unsigned(number_unsigned_t v) override { return put(v); }
  bool number_float(number_float_t v, const string_t&) override { return put(v); }
  bool string(string_t& v) override { return put(v); }
  bool binary(binary_t&) override { return put(json()); }

  bool start_object(std::size_t) override {
    if (!started_) {
      started_ = true;
      return true;
    }
    frames_.push_back({json::object(), {}});
    return true;
  }
  bool start_array(std::size_t) override {
    if (!started_) return false;  // top level must be an object
    frames_.push_back({json::array(), {}});
    return true;
  }
  bool key(string_t& k) override {
    if (frames_.empty()) {
      top_key_ = k;
    } else {
      frames_.back().pending_key = k;
    }
    return true;
  }
  bool end_object() override { return close(); }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  struct Frame {
    json value;
    std::string pending_key;
  };

  bool put(json v) {
    if (!started_) return false;
    if (frames_.empty()) {
      members.emplace_back(top_key_, std::move(v));
    } else if (frames_.back().value.is_object()) {
      frames_.back().value[frames_.back().pending_key] = std::move(v);
    } else {
      frames_.back().value.push_back(std::move(v));
    }
    return true;
  }

  bool close() {
    if (frames_.empty()) {
      complete = true;
      return true;
    }
    json v = std::move(frames_.back().value);
    frames_.pop_back();
    return put(std::move(v));
  }

  bool started_ = false;
  std::string top_key_;
  std::vector<Frame> frames_;
};

std::optional<std::vector<std::pair<std::string, json>>> extract_object(std::string_view text) {
  constexpr int kMaxStarts = 256;
  int starts = 0;
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos && starts < kMaxStarts;
       pos = text.find('{', pos + 1), ++starts) {
    MemberCollector collector;
    const bool ok = json::sax_parse(text.begin() + static_cast<std::ptrdiff_t>(pos), text.end(), &collector,
                                    json::input_format_t::json, /*strict=*/false);
    if (ok && collector.complete) return std::move(collector.members);
  }
  return std::nullopt;
}

std::optional<double> as_score(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && std::isfinite(d)) return d;
  }
  return std::nullopt;
}

// Accepts ["rationale", score], [score, "rationale"], {"rationale":..,"score":..} or a bare score.
std::optional<std::pair<double, std::string>> parse_entry(const json& v) {
  std::optional<double> score;
  std::string rationale;
  if (v.is_array()) {
    for (const json& item : v) {
      if (!score && item.is_number()) {
        score = item.get<double>();
      } else if (item.is_string() && rationale.empty()) {
        rationale = item.get<std::string>();
      }
    }
    if (!score) {
      for (const json& item : v) {
        if ((score = as_score(item))) {
          if (item.is_string() && item.get<std::string>() == rationale) rationale.clear();
          break;
        }
      }
    }
  } else if (v.is_object()) {
    if (v.contains("score")) score = as_score(v["score"]);
    for (const char* key : {"rationale", "justification", "reason"}) {
      if (v.contains(key) && v[key].is_string()) {
        rationale = v[key].get<std::string>();
        break;
      }
    }
  } else {
    score = as_score(v);
  }
  if (!score) return std::nullopt;
  return std::make_pair(std::clamp(*score, 0.0, 100.0), rationale);
}

Pool filtered_or_throw(const Pool& pool, OutcomeFilter f) {
  Pool p = pool.filtered(f);
  if (p.empty()) throw EmptyPool();
  return p;
}

std::vector<std::string> ids_of(const Pool& pool) {
  std::vector<std::string> ids;
  ids.reserve(pool.size());
  for (const Heuristic& h : pool.entries()) ids.push_back(h.scenario_id);
  return ids;
}

}  // namespace

std::string_view to_string(RetrievalMethod m) {
  switch (m) {
    case RetrievalMethod::llm: return "llm";
    case RetrievalMethod::embedding: return "embedding";
    case RetrievalMethod::random: return "random";
  }
  return "llm";
}

RetrievalMethod parse_retrieval_method(std::string_view text) {
  if (text == "llm") return RetrievalMethod::llm;
  if (text == "embedding") return RetrievalMethod::embedding;
  if (text == "random") return RetrievalMethod::random;
  throw ConfigError("unknown retrieval method '" + std::string(text) + "'");
}

void validate(const RetrievalConfig& config) {
  if (config.k < 1) throw ConfigError("k must be at least 1");
  if (config.retry_limit < 0) throw ConfigError("retry_limit must be non-negative");
  if (config.method == RetrievalMethod::random && !config.seed) {
    throw ConfigError("random retrieval needs a seed");
  }
  if (config.method != RetrievalMethod::random && config.seed) {
    throw ConfigError("a seed is only meaningful for random retrieval");
  }
}

std::string check_invariants(const RetrievalResult& result, const Pool& pool) {
  const std::size_t cap = std::min<std::size_t>(static_cast<std::size_t>(std::max(result.requested_k, 0)),
                                                pool.size());
  if (result.ranked.size() > cap) return "more results than min(k, pool size)";
  std::unordered_set<std::string> seen;
  for (const RankedHeuristic& r : result.ranked) {
    if (!pool.contains(r.scenario_id)) return "unknown scenario_id " + r.scenario_id;
    if (!seen.insert(r.scenario_id).second) return "duplicate scenario_id " + r.scenario_id;
    switch (result.method_used) {
      case RetrievalMethod::llm:
        if (!(r.score >= 0.0 && r.score <= 100.0)) return "llm score out of [0, 100]";
        break;
      case RetrievalMethod::embedding:
        if (!(r.score >= -1.0 && r.score <= 1.0)) return "cosine score out of [-1, 1]";
        break;
      case RetrievalMethod::random:
        if (r.score != 0.0) return "random score must be 0";
        break;
    }
  }
  return {};
}

std::string format_pool_listing(const Pool& pool) {
  std::string out;
  for (const Heuristic& h : pool.entries()) {
    if (!out.empty()) out += "\n---\n";
    out += "Scenario ID: " + h.scenario_id + "\n";
    out += "Task description: " + h.task + "\n";
    out += "Reward: " + std::string(to_string(h.outcome)) + "\n";
    out += "Heuristic text:\n" + h.raw_text + "\n";
  }
  return out;
}

std::string build_retrieval_prompt(const PromptTemplate& retrieval_template, std::string_view task,
                                   const Pool& pool, int k) {
  if (pool.empty()) throw EmptyPool();
  return retrieval_template.render({{"k", std::to_string(k)},
                                    {"heuristics_list", format_pool_listing(pool)},
                                    {"task", std::string(task)}});
}

std::vector<RankedHeuristic> parse_ranker_response(std::string_view text,
                                                   std::span<const std::string> valid_ids, int k) {
  auto members = extract_object(text);
  if (!members) throw MalformedRankerOutput("no JSON object in ranker output");

  std::unordered_map<std::string_view, std::size_t> order;
  for (std::size_t i = 0; i < valid_ids.size(); ++i) order.emplace(valid_ids[i], i);

  std::vector<std::pair<RankedHeuristic, std::size_t>> picked;
  std::unordered_set<std::string> seen;
  for (auto& [id, value] : *members) {
    auto it = order.find(id);
    if (it == order.end() || seen.contains(id)) continue;
    seen.insert(id);
    auto entry = parse_entry(value);
    if (!entry) continue;
    picked.push_back({RankedHeuristic{id, entry->first, entry->second}, it->second});
  }
  std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
    if (a.first.score != b.first.score) return a.first.score > b.first.score;
    return a.second < b.second;
  });
  std::vector<RankedHeuristic> out;
  for (auto& [r, _] : picked) {
    if (static_cast<int>(out.size()) >= k) break;
    out.push_back(std::move(r));
  }
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine of vectors with " + std::to_string(u.size()) + " and " +
                            std::to_string(v.size()) + " dimensions");
  }
  const simd::CosineParts p = simd::cosine_parts(u, v);
  if (p.norm_sq_a == 0.0 || p.norm_sq_b == 0.0) throw ZeroVector();
  return std::clamp(p.dot / (std::sqrt(p.norm_sq_a) * std::sqrt(p.norm_sq_b)), -1.0, 1.0);
}

RetrievalResult rank_llm(std::string_view task, const Pool& pool, const RetrievalConfig& config,
                         Gateway& gateway, const PromptTemplates& templates, const std::string& session) {
  const Pool candidates = filtered_or_throw(pool, config.outcome_filter);
  const std::vector<std::string> ids = ids_of(candidates);
  const std::vector<ChatMessage> messages{
      ChatMessage::user(build_retrieval_prompt(templates.heuristic_retrieval, task, candidates, config.k))};
  ChatParams params;
  params.step = StepLabel::retrieval;
  params.session = session;

  RetrievalResult result;
  result.requested_k = config.k;
  for (int attempt = 0; attempt <= config.retry_limit; ++attempt) {
    ++result.attempts;
    const ChatResult reply = gateway.chat(messages, {}, params);
    try {
      result.ranked = parse_ranker_response(reply.message.content, ids, config.k);
      result.method_used = RetrievalMethod::llm;
      return result;
    } catch (const MalformedRankerOutput&) {
      // retry, then fall back
    }
  }
  RetrievalResult fallback = rank_embedding(task, pool, config, gateway);
  fallback.attempts = result.attempts;
  return fallback;
}

RetrievalResult rank_embedding(std::string_view task, const Pool& pool, const RetrievalConfig& config,
                               Gateway& gateway) {
  const Pool candidates = filtered_or_throw(pool, config.outcome_filter);
  std::vector<std::string> texts;
  texts.reserve(candidates.size() + 1);
  texts.emplace_back(task);
  for (const Heuristic& h : candidates.entries()) texts.push_back(h.task);
  const std::vector<Vector> vectors = gateway.embed(texts, StepLabel::retrieval);

  const Vector& query = vectors.front();
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double score = 0.0;
    try {
      score = cosine(query, vectors[i + 1]);
    } catch (const ZeroVector&) {
      score = 0.0;  // nothing to compare against; ranks by insertion order
    }
    scored.emplace_back(score, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  RetrievalResult result;
  result.method_used = RetrievalMethod::embedding;
  result.requested_k = config.k;
  const std::size_t n = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(config.k));
  for (std::size_t i = 0; i < n; ++i) {
    const Heuristic& h = candidates.entries()[scored[i].second];
    result.ranked.push_back({h.scenario_id, scored[i].first, "cosine similarity of task descriptions"});
  }
  return result;
}

RetrievalResult rank_random(const Pool& pool, const RetrievalConfig& config) {
  if (!config.seed) throw ConfigError("random retrieval needs a seed");
  const Pool candidates = filtered_or_throw(pool, config.outcome_filter);
  std::vector<std::size_t> index(candidates.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::mt19937_64 rng(*config.seed);
  const std::size_t n = std::min<std::size_t>(index.size(), static_cast<std::size_t>(config.k));
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, index.size() - 1);
    std::swap(index[i], index[pick(rng)]);
  }
  RetrievalResult result;
  result.method_used = RetrievalMethod::random;
  result.requested_k = config.k;
  for (std::size_t i = 0; i < n; ++i) {
    result.ranked.push_back({candidates.entries()[index[i]].scenario_id, 0.0, "random selection"});
  }
  return result;
}

RetrievalResult retrieve(std::string_view task, const Pool& pool, const RetrievalConfig& config,
                         Gateway& gateway, const PromptTemplates& templates, const std::string& session) {
  validate(config);
  if (pool.filtered(config.outcome_filter).empty()) {
    RetrievalResult empty;
    empty.method_used = config.method;
    empty.requested_k = config.k;
    return empty;
  }
  switch (config.method) {
    case RetrievalMethod::llm: return rank_llm(task, pool, config, gateway, templates, session);
    case RetrievalMethod::embedding: return rank_embedding(task, pool, config, gateway);
    case RetrievalMethod::random: return rank_random(pool, config);
  }
  throw ConfigError("unknown retrieval method");
}

}  // namespace erl
