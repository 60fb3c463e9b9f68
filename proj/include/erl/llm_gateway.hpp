#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace erl {

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role r);
Role parse_role(std::string_view text);

struct ToolCall {
  std::string id;
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();

  bool operator==(const ToolCall&) const = default;
};

struct ChatMessage {
  Role role = Role::user;
  std::string content;
  std::optional<ToolCall> tool_call;
  std::optional<std::string> tool_call_id;

  static ChatMessage system(std::string content) { return {Role::system, std::move(content), {}, {}}; }
  static ChatMessage user(std::string content) { return {Role::user, std::move(content), {}, {}}; }
  static ChatMessage assistant(std::string content, std::optional<ToolCall> call = {}) {
    return {Role::assistant, std::move(content), std::move(call), {}};
  }
  static ChatMessage tool(std::string call_id, std::string content) {
    return {Role::tool, std::move(content), {}, std::move(call_id)};
  }

  bool operator==(const ChatMessage&) const = default;
};

// Throws PreconditionError if a tool message lacks tool_call_id. Empty
// assistant replies are legal; callers decide what they mean.
void validate(const ChatMessage& m);

// Pipeline stage a call is billed to.
enum class StepLabel { generation, retrieval, rollout, self_assessment };

std::string_view to_string(StepLabel s);
StepLabel parse_step_label(std::string_view text);

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t cached_prompt_tokens = 0;
  StepLabel step = StepLabel::rollout;

  bool operator==(const Usage&) const = default;
};

struct ToolSchema {
  std::string name;
  std::string description;
  nlohmann::json parameters = nlohmann::json::object();
};

struct ChatParams {
  StepLabel step = StepLabel::rollout;
  // Scripted backends replay one FIFO queue per session; live backends ignore it.
  std::string session = "default";
  double temperature = 0.0;
};

struct ChatResult {
  ChatMessage message;
  Usage usage;
};

using Vector = std::vector<double>;

struct EmbedResult {
  std::vector<Vector> vectors;
  std::int64_t prompt_tokens = 0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResult complete(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                              const ChatParams& params) = 0;
};

class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual EmbedResult embed(std::span<const std::string> texts) = 0;
};

// Append-only record of every model call. Thread-safe.
class UsageLedger {
 public:
  void record(const Usage& u);
  std::vector<Usage> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<Usage> entries_;
};

struct StepTotals {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t cached_prompt_tokens = 0;
  std::int64_t calls = 0;

  StepTotals& operator+=(const StepTotals& o);
  bool operator==(const StepTotals&) const = default;
};

struct UsageReport {
  std::map<StepLabel, StepTotals> steps;  // every label present, zero when unused
  StepTotals total;

  const StepTotals& at(StepLabel s) const { return steps.at(s); }
};

UsageReport usage_report(std::span<const Usage> entries);
UsageReport usage_report(const UsageLedger& ledger);

// Front door for model calls: validates messages and bills usage to the ledger.
class Gateway {
 public:
  Gateway(ChatBackend& chat, EmbedBackend& embedder, UsageLedger& ledger)
      : chat_(&chat), embed_(&embedder), ledger_(&ledger) {}

  ChatResult chat(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                  const ChatParams& params);

  // One vector per text, all the same length. Billed to `step`.
  std::vector<Vector> embed(std::span<const std::string> texts, StepLabel step);

  UsageLedger& ledger() { return *ledger_; }

 private:
  ChatBackend* chat_;
  EmbedBackend* embed_;
  UsageLedger* ledger_;
};

// ---------------------------------------------------------------------------
// Scripted backend

struct ScriptedResponse {
  std::vector<std::string> guards;  // each must occur in the request text
  std::string content;
  std::optional<ToolCall> tool_call;
  std::optional<Usage> usage;  // estimated from text length when absent
};

struct ScriptedCall {
  std::string session;
  std::string request_text;
  StepLabel step;
};

// Deterministic replay: responses are consumed FIFO per session name. A
// session with no queue of its own falls back to the "default" queue.
class ScriptedBackend final : public ChatBackend {
 public:
  ScriptedBackend() = default;
  ScriptedBackend(ScriptedBackend&& other) noexcept;

  static ScriptedBackend load(const std::filesystem::path& path);
  static ScriptedBackend from_json(const nlohmann::json& script);

  void push(const std::string& session, ScriptedResponse response);
  void push_text(const std::string& session, std::string content);

  ChatResult complete(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                      const ChatParams& params) override;

  std::size_t remaining(const std::string& session) const;
  std::vector<ScriptedCall> calls() const;
  // Scripted embeddings, when the script file carried an "embeddings" table.
  const std::map<std::string, Vector>& embeddings() const { return embeddings_; }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::deque<ScriptedResponse>> sessions_;
  std::vector<ScriptedCall> calls_;
  std::map<std::string, Vector> embeddings_;
};

// Fixed text -> vector table. Unknown text is a BackendError.
class ScriptedEmbedder final : public EmbedBackend {
 public:
  explicit ScriptedEmbedder(std::map<std::string, Vector> table) : table_(std::move(table)) {}
  EmbedResult embed(std::span<const std::string> texts) override;

 private:
  std::map<std::string, Vector> table_;
};

// Deterministic bag-of-words feature hashing. Stand-in for an embedding model
// in tests and offline runs.
class HashEmbedder final : public EmbedBackend {
 public:
  explicit HashEmbedder(std::size_t dim = 256) : dim_(dim) {}
  EmbedResult embed(std::span<const std::string> texts) override;

 private:
  std::size_t dim_;
};

// ---------------------------------------------------------------------------
// Live HTTP backend (chat-completions wire format)

struct HttpConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string chat_path = "/chat/completions";
  std::string embed_path = "/embeddings";
  std::string model = "gpt-5-mini";
  std::string embed_model = "text-embedding-3-small";
  std::string api_key;  // defaults to $ERL_API_KEY
  int timeout_seconds = 120;
  int retries = 2;  // extra attempts on 429, 5xx and connection failures
};

class HttpBackend final : public ChatBackend, public EmbedBackend {
 public:
  explicit HttpBackend(HttpConfig config);

  ChatResult complete(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                      const ChatParams& params) override;
  EmbedResult embed(std::span<const std::string> texts) override;

  nlohmann::json build_chat_request(std::span<const ChatMessage> messages,
                                    std::span<const ToolSchema> tools, const ChatParams& params) const;

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  HttpConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// Parses a chat-completions response body. Exposed for tests.
ChatResult parse_chat_response(const nlohmann::json& body, StepLabel step);

int estimate_tokens(std::string_view text);

}  // namespace erl
