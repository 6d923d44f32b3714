#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace clarify {

/// Text with `{name}` placeholders (name = [a-z_]+). Any other braces are literal,
/// so exemplar text such as "{'Fiction': 152}" passes through untouched.
struct PromptTemplate {
  std::string name;
  std::string body;
  std::vector<std::string> stop;

  /// Placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;

  /// Throws ValidationError when a referenced placeholder has no value.
  std::string render(const std::map<std::string, std::string>& values) const;

  static PromptTemplate load(const std::filesystem::path& dir, const std::string& name);
};

/// The five templates the generative roles use.
struct PromptLibrary {
  PromptTemplate question_t0;
  PromptTemplate question_tn;
  PromptTemplate answer_sim;
  PromptTemplate summarize;
  PromptTemplate label;

  static PromptLibrary load(const std::filesystem::path& dir);
};

}  // namespace clarify
