#include <string>

#include "erl/errors.hpp"
#include "erl/llm_gateway.hpp"

namespace erl {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
  }
  return "user";
}

Role parse_role(std::string_view text) {
  if (text == "system") return Role::system;
  if (text == "user") return Role::user;
  if (text == "assistant") return Role::assistant;
  if (text == "tool") return Role::tool;
  throw Error("unknown role '" + std::string(text) + "'");
}

void validate(const ChatMessage& m) {
  if (m.role == Role::tool && !m.tool_call_id) {
    throw PreconditionError("tool message without tool_call_id");
  }
}

std::string_view to_string(StepLabel s) {
  switch (s) {
    case StepLabel::generation: return "generation";
    case StepLabel::retrieval: return "retrieval";
    case StepLabel::rollout: return "rollout";
    case StepLabel::self_assessment: return "self_assessment";
  }
  return "rollout";
}

StepLabel parse_step_label(std::string_view text) {
  if (text == "generation") return StepLabel::generation;
  if (text == "retrieval") return StepLabel::retrieval;
  if (text == "rollout") return StepLabel::rollout;
  if (text == "self_assessment") return StepLabel::self_assessment;
  throw Error("unknown step label '" + std::string(text) + "'");
}

int estimate_tokens(std::string_view text) { return static_cast<int>((text.size() + 3) / 4); }

void UsageLedger::record(const Usage& u) {
  std::lock_guard lock(mu_);
  entries_.push_back(u);
}

std::vector<Usage> UsageLedger::snapshot() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t UsageLedger::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

StepTotals& StepTotals::operator+=(const StepTotals& o) {
  prompt_tokens += o.prompt_tokens;
  completion_tokens += o.completion_tokens;
  cached_prompt_tokens += o.cached_prompt_tokens;
  calls += o.calls;
  return *this;
}

UsageReport usage_report(std::span<const Usage> entries) {
  UsageReport r;
  for (StepLabel s : {StepLabel::generation, StepLabel::retrieval, StepLabel::rollout,
                      StepLabel::self_assessment}) {
    r.steps[s] = {};
  }
  for (const Usage& u : entries) {
    StepTotals& t = r.steps[u.step];
    t.prompt_tokens += u.prompt_tokens;
    t.completion_tokens += u.completion_tokens;
    t.cached_prompt_tokens += u.cached_prompt_tokens;
    t.calls += 1;
  }
  for (const auto& [label, t] : r.steps) r.total += t;
  return r;
}

UsageReport usage_report(const UsageLedger& ledger) {
  const std::vector<Usage> entries = ledger.snapshot();
  return usage_report(entries);
}

ChatResult Gateway::chat(std::span<const ChatMessage> messages, std::span<const ToolSchema> tools,
                         const ChatParams& params) {
  if (messages.empty()) throw PreconditionError("chat needs at least one message");
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].role == Role::system && i != 0) {
      throw PreconditionError("system message must come first");
    }
    validate(messages[i]);
  }
  ChatResult result = chat_->complete(messages, tools, params);
  if (result.message.role != Role::assistant) {
    throw BackendError("backend returned a non-assistant message");
  }
  validate(result.message);
  result.usage.step = params.step;
  if (result.usage.cached_prompt_tokens > result.usage.prompt_tokens) {
    result.usage.cached_prompt_tokens = result.usage.prompt_tokens;
  }
  ledger_->record(result.usage);
  return result;
}

std::vector<Vector> Gateway::embed(std::span<const std::string> texts, StepLabel step) {
  if (texts.empty()) throw PreconditionError("embed needs at least one text");
  EmbedResult r = embed_->embed(texts);
  if (r.vectors.size() != texts.size()) {
    throw DimensionMismatch("embedding backend returned " + std::to_string(r.vectors.size()) +
                            " vectors for " + std::to_string(texts.size()) + " texts");
  }
  for (const Vector& v : r.vectors) {
    if (v.size() != r.vectors.front().size()) {
      throw DimensionMismatch("embedding backend returned vectors of unequal length");
    }
  }
  ledger_->record(Usage{r.prompt_tokens, 0, 0, step});
  return std::move(r.vectors);
}

}  // namespace erl
