#include <cctype>
#include <fstream>

#include "erl/errors.hpp"
#include "erl/llm_gateway.hpp"

namespace erl {
namespace {

using nlohmann::json;

std::string request_text(std::span<const ChatMessage> messages) {
  std::string text;
  for (const ChatMessage& m : messages) {
    if (!text.empty()) text += '\n';
    text += m.content;
    if (m.tool_call) text += m.tool_call->name + m.tool_call->arguments.dump();
  }
  return text;
}

ScriptedResponse response_from_json(const json& j, const std::string& where) {
  ScriptedResponse r;
  if (j.is_string()) {
    r.content = j.get<std::string>();
    return r;
  }
  if (!j.is_object()) throw ConfigError(where + ": entry must be a string or an object");
  if (j.contains("guard")) {
    const json& g = j["guard"];
    if (g.is_string()) {
      r.guards.push_back(g.get<std::string>());
    } else {
      for (const json& s : g) r.guards.push_back(s.get<std::string>());
    }
  }
  r.content = j.value("content", std::string());
  if (j.contains("tool_call")) {
    const json& tc = j["tool_call"];
    r.tool_call = ToolCall{tc.value("id", std::string()), tc.at("name").get<std::string>(),
                           tc.value("arguments", json::object())};
  }
  if (r.content.empty() && !r.tool_call) {
    throw ConfigError(where + ": entry needs content or tool_call");
  }
  if (j.contains("usage")) {
    const json& u = j["usage"];
    Usage usage;
    usage.prompt_tokens = u.value("prompt_tokens", 0);
    usage.completion_tokens = u.value("completion_tokens", 0);
    usage.cached_prompt_tokens = u.value("cached_tokens", 0);
    r.usage = usage;
  }
  return r;
}

}  // namespace

ScriptedBackend::ScriptedBackend(ScriptedBackend&& other) noexcept {
  std::lock_guard lock(other.mu_);
  sessions_ = std::move(other.sessions_);
  calls_ = std::move(other.calls_);
  embeddings_ = std::move(other.embeddings_);
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read script " + path.string());
  json script;
  try {
    script = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("script " + path.string() + ": " + e.what());
  }
  return from_json(script);
}

ScriptedBackend ScriptedBackend::from_json(const json& script) {
  ScriptedBackend backend;
  try {
    if (script.contains("sessions")) {
      for (const auto& [name, entries] : script["sessions"].items()) {
        std::size_t i = 0;
        for (const json& e : entries) {
          backend.push(name, response_from_json(e, "sessions." + name + "[" + std::to_string(i++) + "]"));
        }
      }
    }
    if (script.contains("embeddings")) {
      for (const auto& [text, vec] : script["embeddings"].items()) {
        backend.embeddings_[text] = vec.get<Vector>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad script: ") + e.what());
  }
  return backend;
}

void ScriptedBackend::push(const std::string& session, ScriptedResponse response) {
  std::lock_guard lock(mu_);
  sessions_[session].push_back(std::move(response));
}

void ScriptedBackend::push_text(const std::string& session, std::string content) {
  ScriptedResponse r;
  r.content = std::move(content);
  push(session, std::move(r));
}

ChatResult ScriptedBackend::complete(std::span<const ChatMessage> messages,
                                     std::span<const ToolSchema> /*tools*/, const ChatParams& params) {
  const std::string text = request_text(messages);
  ScriptedResponse r;
  std::size_t call_index = 0;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(params.session);
    if (it == sessions_.end() || it->second.empty()) it = sessions_.find("default");
    if (it == sessions_.end() || it->second.empty()) throw BackendScriptExhausted(params.session);
    r = std::move(it->second.front());
    it->second.pop_front();
    calls_.push_back({params.session, text, params.step});
    call_index = calls_.size();
  }
  for (const std::string& guard : r.guards) {
    if (text.find(guard) == std::string::npos) {
      throw ScriptGuardViolation("session '" + params.session + "': request does not contain '" +
                                 guard + "'");
    }
  }
  ChatResult result;
  result.message = ChatMessage::assistant(r.content, r.tool_call);
  if (result.message.tool_call && result.message.tool_call->id.empty()) {
    result.message.tool_call->id = "call_" + std::to_string(call_index);
  }
  if (r.usage) {
    result.usage = *r.usage;
  } else {
    const std::string completion = r.content + (r.tool_call ? r.tool_call->arguments.dump() : "");
    result.usage.prompt_tokens = estimate_tokens(text);
    result.usage.completion_tokens = estimate_tokens(completion);
  }
  result.usage.step = params.step;
  return result;
}

std::size_t ScriptedBackend::remaining(const std::string& session) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session);
  return it == sessions_.end() ? 0 : it->second.size();
}

std::vector<ScriptedCall> ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

EmbedResult ScriptedEmbedder::embed(std::span<const std::string> texts) {
  EmbedResult r;
  for (const std::string& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) throw BackendError("no scripted embedding for '" + t.substr(0, 60) + "'");
    r.vectors.push_back(it->second);
    r.prompt_tokens += estimate_tokens(t);
  }
  return r;
}

EmbedResult HashEmbedder::embed(std::span<const std::string> texts) {
  EmbedResult r;
  for (const std::string& t : texts) {
    Vector v(dim_, 0.0);
    std::uint64_t h = 14695981039346656037ull;
    bool in_word = false;
    auto flush = [&] {
      if (in_word) v[h % dim_] += 1.0;
      h = 14695981039346656037ull;
      in_word = false;
    };
    for (char c : t) {
      const auto uc = static_cast<unsigned char>(c);
      if (std::isalnum(uc)) {
        h = (h ^ static_cast<std::uint64_t>(std::tolower(uc))) * 1099511628211ull;
        in_word = true;
      } else {
        flush();
      }
    }
    flush();
    r.vectors.push_back(std::move(v));
    r.prompt_tokens += estimate_tokens(t);
  }
  return r;
}

}  // namespace erl
