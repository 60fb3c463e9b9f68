#include "erl/prompt_template.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "erl/errors.hpp"

#ifndef ERL_TEMPLATE_DIR
#define ERL_TEMPLATE_DIR "templates"
#endif

namespace erl {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of an `{identifier}` token starting at text[pos], or 0.
std::size_t placeholder_length(std::string_view text, std::size_t pos) {
  if (text[pos] != '{' || pos + 1 >= text.size() || !is_ident_start(text[pos + 1])) return 0;
  std::size_t i = pos + 2;
  while (i < text.size() && is_ident(text[i])) ++i;
  if (i < text.size() && text[i] == '}') return i - pos + 1;
  return 0;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  return PromptTemplate(read_file(path));
}

bool PromptTemplate::has_placeholder(std::string_view name) const {
  return text_.find("{" + std::string(name) + "}") != std::string::npos;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  for (const auto& [name, value] : values) {
    if (!has_placeholder(name)) throw TemplateError("template has no {" + name + "} placeholder");
  }
  std::string out;
  out.reserve(text_.size());
  std::size_t i = 0;
  while (i < text_.size()) {
    std::size_t len = placeholder_length(text_, i);
    if (len > 0) {
      auto it = values.find(text_.substr(i + 1, len - 2));
      if (it != values.end()) {
        out += it->second;
        i += len;
        continue;
      }
    }
    out += text_[i++];
  }
  return out;
}

std::size_t count_placeholders(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (placeholder_length(text, i) > 0) ++n;
  }
  return n;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.heuristic_generation = PromptTemplate::load(dir / "heuristic_generation.txt");
  t.heuristic_retrieval = PromptTemplate::load(dir / "heuristic_retrieval.txt");
  t.self_assessment = PromptTemplate::load(dir / "self_assessment.txt");
  t.agent_system = read_file(dir / "agent_system.txt");
  return t;
}

std::filesystem::path default_template_dir() { return ERL_TEMPLATE_DIR; }

}  // namespace erl
