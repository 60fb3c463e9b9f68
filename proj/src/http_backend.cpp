#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "erl/errors.hpp"
#include "erl/llm_gateway.hpp"

namespace erl {
namespace {

using nlohmann::json;

constexpr std::size_t kBodyExcerpt = 300;

json message_to_json(const ChatMessage& m) {
  json j{{"role", to_string(m.role)}};
  if (m.role == Role::assistant && m.tool_call) {
    j["content"] = m.content.empty() ? json() : json(m.content);
    j["tool_calls"] = json::array({json{{"id", m.tool_call->id},
                                        {"type", "function"},
                                        {"function",
                                         {{"name", m.tool_call->name},
                                          {"arguments", m.tool_call->arguments.dump()}}}}});
  } else {
    j["content"] = m.content;
  }
  if (m.tool_call_id) j["tool_call_id"] = *m.tool_call_id;
  return j;
}

}  // namespace

ChatResult parse_chat_response(const json& body, StepLabel step) {
  try {
    const json& msg = body.at("choices").at(0).at("message");
    ChatResult r;
    r.message.role = Role::assistant;
    if (msg.contains("content") && msg["content"].is_string()) r.message.content = msg["content"];
    if (msg.contains("tool_calls") && msg["tool_calls"].is_array() && !msg["tool_calls"].empty()) {
      const json& tc = msg["tool_calls"][0];
      ToolCall call;
      call.id = tc.value("id", std::string());
      call.name = tc.at("function").at("name").get<std::string>();
      const json& args = tc["function"].value("arguments", json("{}"));
      if (args.is_string()) {
        // Models occasionally emit invalid JSON here; keep the raw text so the
        // agent loop can report it back as an error observation.
        call.arguments = json::parse(args.get<std::string>(), nullptr, false);
        if (call.arguments.is_discarded()) call.arguments = json{{"_unparsed", args}};
      } else {
        call.arguments = args;
      }
      r.message.tool_call = std::move(call);
    }
    if (r.message.content.empty() && !r.message.tool_call) r.message.content = " ";
    if (body.contains("usage") && body["usage"].is_object()) {
      const json& u = body["usage"];
      r.usage.prompt_tokens = u.value("prompt_tokens", 0);
      r.usage.completion_tokens = u.value("completion_tokens", 0);
      if (u.contains("prompt_tokens_details") && u["prompt_tokens_details"].is_object()) {
        r.usage.cached_prompt_tokens = u["prompt_tokens_details"].value("cached_tokens", 0);
      }
    }
    r.usage.step = step;
    return r;
  } catch (const json::exception& e) {
    throw TransportError(200, body.dump().substr(0, kBodyExcerpt),
                         std::string("unexpected chat response shape: ") + e.what());
  }
}

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
  if (config_.api_key.empty()) {
    if (const char* key = std::getenv("ERL_API_KEY")) config_.api_key = key;
  }
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

json HttpBackend::build_chat_request(std::span<const ChatMessage> messages,
                                     std::span<const ToolSchema> tools, const ChatParams& params) const {
  json req{{"model", config_.model}, {"temperature", params.temperature}};
  json msgs = json::array();
  for (const ChatMessage& m : messages) msgs.push_back(message_to_json(m));
  req["messages"] = std::move(msgs);
  if (!tools.empty()) {
    json ts = json::array();
    for (const ToolSchema& t : tools) {
      ts.push_back({{"type", "function"},
                    {"function",
                     {{"name", t.name}, {"description", t.description}, {"parameters", t.parameters}}}});
    }
    req["tools"] = std::move(ts);
  }
  return req;
}

json HttpBackend::post(const std::string& path, const json& body) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  const std::string payload = body.dump();

  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(path_prefix_ + path, headers, payload, "application/json");
    const bool last = attempt >= config_.retries;
    if (!res) {
      const auto err = res.error();
      if (!last) {
        std::this_thread::sleep_for(std::chrono::milliseconds(250 * (attempt + 1)));
        continue;
      }
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        throw TimeoutError("request to " + scheme_host_port_ + path_prefix_ + path + " failed: " +
                           httplib::to_string(err));
      }
      throw TransportError(0, "", "request to " + scheme_host_port_ + path_prefix_ + path +
                                      " failed: " + httplib::to_string(err));
    }
    if ((res->status >= 500 || res->status == 429) && !last) {
      std::this_thread::sleep_for(std::chrono::milliseconds(250 * (attempt + 1)));
      continue;
    }
    if (res->status >= 400) {
      throw TransportError(res->status, res->body.substr(0, kBodyExcerpt),
                           "HTTP " + std::to_string(res->status) + ": " +
                               res->body.substr(0, kBodyExcerpt));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
      throw TransportError(res->status, res->body.substr(0, kBodyExcerpt), "response is not JSON");
    }
    return parsed;
  }
}

ChatResult HttpBackend::complete(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                                 const ChatParams& params) {
  return parse_chat_response(post(config_.chat_path, build_chat_request(messages, tools, params)),
                             params.step);
}

EmbedResult HttpBackend::embed(std::span<const std::string> texts) {
  json req{{"model", config_.embed_model}, {"input", json(std::vector<std::string>(texts.begin(), texts.end()))}};
  const json body = post(config_.embed_path, req);
  try {
    EmbedResult r;
    r.vectors.resize(texts.size());
    std::size_t position = 0;
    for (const json& item : body.at("data")) {
      const std::size_t index = item.value("index", position++);
      if (index >= r.vectors.size()) throw DimensionMismatch("embedding index out of range");
      r.vectors[index] = item.at("embedding").get<Vector>();
    }
    if (body.contains("usage")) r.prompt_tokens = body["usage"].value("prompt_tokens", 0);
    return r;
  } catch (const json::exception& e) {
    throw TransportError(200, body.dump().substr(0, kBodyExcerpt),
                         std::string("unexpected embedding response shape: ") + e.what());
  }
}

}  // namespace erl
