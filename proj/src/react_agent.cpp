#include "erl/react_agent.hpp"

#include <fstream>
#include <sstream>

#include "erl/errors.hpp"

namespace erl {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

constexpr std::string_view kMalformedNotice =
    "Your last message had neither a tool call nor a line starting with \"FINAL ANSWER:\". "
    "Call one of the available tools, or reply with \"FINAL ANSWER: <answer>\" when the task is done.";

}  // namespace

std::string_view to_string(GuidanceKind k) {
  switch (k) {
    case GuidanceKind::none: return "none";
    case GuidanceKind::heuristics: return "heuristics";
    case GuidanceKind::fewshot_trajectories: return "fewshot";
  }
  return "none";
}

GuidanceKind parse_guidance_kind(std::string_view text) {
  if (text == "none") return GuidanceKind::none;
  if (text == "heuristics") return GuidanceKind::heuristics;
  if (text == "fewshot" || text == "fewshot_trajectories") return GuidanceKind::fewshot_trajectories;
  throw ConfigError("unknown guidance kind '" + std::string(text) + "'");
}

std::string render_heuristic_block(const Heuristic& h) {
  std::string out = "Scenario ID: " + h.scenario_id + "\n";
  out += "Task: " + h.task + "\n";
  out += "Reward: " + std::string(to_string(h.outcome)) + "\n";
  out += h.raw_text;
  if (out.back() != '\n') out += '\n';
  return out;
}

GuidancePayload heuristic_guidance(const Pool& pool, const RetrievalResult& retrieved) {
  GuidancePayload g;
  for (const RankedHeuristic& r : retrieved.ranked) {
    if (const Heuristic* h = pool.find(r.scenario_id)) {
      g.items.push_back(render_heuristic_block(*h));
      g.token_estimate += estimate_tokens(g.items.back());
    }
  }
  g.kind = g.items.empty() ? GuidanceKind::none : GuidanceKind::heuristics;
  return g;
}

nlohmann::json to_json(const TrajectoryRecord& r) {
  return nlohmann::json{{"scenario_id", r.scenario_id},
                        {"task", r.task},
                        {"outcome", to_string(r.outcome)},
                        {"trajectory", to_json(r.trajectory)}};
}

TrajectoryRecord trajectory_record_from_json(const nlohmann::json& j) {
  try {
    TrajectoryRecord r;
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.task = j.at("task").get<std::string>();
    r.outcome = parse_outcome(j.at("outcome").get<std::string>());
    r.trajectory = trajectory_from_json(j.at("trajectory"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad trajectory record: ") + e.what());
  }
}

void save_trajectories(const std::filesystem::path& path, std::span<const TrajectoryRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const TrajectoryRecord& r : records) {
    out << to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<TrajectoryRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(trajectory_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(line_no, e.what());
    } catch (const Error& e) {
      throw FormatError(line_no, e.what());
    }
  }
  return out;
}

std::string render_fewshot_item(const TrajectoryRecord& r) {
  std::string out = "Task: " + r.task + "\n";
  out += "Outcome: " + std::string(to_string(r.outcome)) + "\n";
  out += serialize_trajectory(r.trajectory);
  return out;
}

GuidancePayload render_fewshot_block(std::span<const TrajectoryRecord> trajectories, std::int64_t budget_tokens) {
  if (budget_tokens <= 0) throw PreconditionError("few-shot budget must be positive");
  GuidancePayload g;
  for (const TrajectoryRecord& r : trajectories) {
    std::string item = render_fewshot_item(r);
    const std::int64_t cost = estimate_tokens(item);
    if (g.token_estimate + cost > budget_tokens) break;
    g.token_estimate += cost;
    g.items.push_back(std::move(item));
  }
  g.kind = g.items.empty() ? GuidanceKind::none : GuidanceKind::fewshot_trajectories;
  return g;
}

std::string compose_system_prompt(std::string_view base, const GuidancePayload& guidance) {
  if (trim(base).empty()) throw PreconditionError("base system prompt is empty");
  if (guidance.kind == GuidanceKind::none || guidance.items.empty()) return std::string(base);

  const bool lessons = guidance.kind == GuidanceKind::heuristics;
  std::string out(base);
  if (out.back() != '\n') out += '\n';
  out += '\n';
  out += lessons ? kLessonsBegin : kExamplesBegin;
  out += '\n';
  out += lessons ? "The following lessons were distilled from your earlier tasks. Apply the ones that fit.\n"
                 : "The following are complete trajectories from your earlier tasks.\n";
  for (std::size_t i = 0; i < guidance.items.size(); ++i) {
    out += '\n';
    out += (lessons ? "[Lesson " : "[Example ") + std::to_string(i + 1) + "]\n";
    out += guidance.items[i];
    if (out.back() != '\n') out += '\n';
  }
  out += lessons ? kLessonsEnd : kExamplesEnd;
  out += '\n';
  return out;
}

ParsedAction parse_action(const ChatMessage& assistant_message) {
  if (assistant_message.tool_call) {
    if (assistant_message.tool_call->name.empty()) return MalformedAction{"tool call without a name"};
    return *assistant_message.tool_call;
  }
  const std::string& content = assistant_message.content;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t eol = content.find('\n', pos);
    const std::string_view line =
        std::string_view(content).substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line.substr(first).starts_with(kFinalAnswerSentinel)) {
      return FinalAnswer{trim(std::string_view(content).substr(pos + first + kFinalAnswerSentinel.size()))};
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return MalformedAction{"no tool call and no final answer"};
}

EpisodeResult run_episode(const Scenario& scenario, const Universe& universe, Gateway& gateway,
                          std::string_view base_system_prompt, const GuidancePayload& guidance,
                          const EpisodeLimits& limits) {
  EpisodeResult result{{}, Outcome::failure, WorldState(universe)};
  std::vector<ChatMessage> messages{ChatMessage::system(compose_system_prompt(base_system_prompt, guidance)),
                                    ChatMessage::user(scenario.task)};
  ChatParams params;
  params.step = StepLabel::rollout;
  params.session = "rollout/" + scenario.scenario_id;

  Trajectory& traj = result.trajectory;
  while (traj.turn_count < limits.max_turns) {
    ChatMessage reply = gateway.chat(messages, tool_schemas(), params).message;
    ++traj.turn_count;
    const ParsedAction action = parse_action(reply);

    if (const auto* call = std::get_if<ToolCall>(&action)) {
      ToolCall c = *call;
      if (c.id.empty()) c.id = "call_" + std::to_string(traj.turn_count);
      reply.tool_call = c;
      const ToolResult tool = invoke(result.final_state, c.name, c.arguments);
      traj.steps.push_back({reply.content, ToolAction{c.name, c.arguments}, tool.observation()});
      messages.push_back(std::move(reply));
      messages.push_back(ChatMessage::tool(c.id, tool.observation()));
      continue;
    }
    if (const auto* answer = std::get_if<FinalAnswer>(&action)) {
      traj.steps.push_back({reply.content, std::nullopt, std::nullopt});
      traj.final_answer = answer->text;
      break;
    }
    traj.steps.push_back({reply.content, std::nullopt, std::string(kMalformedNotice)});
    messages.push_back(std::move(reply));
    messages.push_back(ChatMessage::user(std::string(kMalformedNotice)));
  }

  if (traj.final_answer) result.outcome = verify(scenario, result.final_state, traj.final_answer);
  return result;
}

}  // namespace erl
