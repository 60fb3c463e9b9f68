#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace erl {

// A text template with `{name}` placeholders.
//
// Only braces enclosing a name that is bound at render time are substituted;
// any other brace (for instance a literal JSON example) passes through
// untouched. Substitution is single-pass, so values that themselves contain
// `{...}` are never expanded.
class PromptTemplate {
 public:
  PromptTemplate() = default;
  explicit PromptTemplate(std::string text) : text_(std::move(text)) {}

  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& text() const { return text_; }

  // Throws TemplateError if a bound name has no placeholder in the template.
  std::string render(const std::map<std::string, std::string>& values) const;

  bool has_placeholder(std::string_view name) const;

 private:
  std::string text_;
};

// Number of `{identifier}` tokens left in a rendered prompt.
std::size_t count_placeholders(std::string_view text);

// Template files shipped in templates/.
struct PromptTemplates {
  PromptTemplate heuristic_generation;
  PromptTemplate heuristic_retrieval;
  PromptTemplate self_assessment;
  std::string agent_system;

  static PromptTemplates load(const std::filesystem::path& dir);
};

// Directory holding the shipped templates, baked in at build time.
std::filesystem::path default_template_dir();

}  // namespace erl
