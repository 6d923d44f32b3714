#include "clarify/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "clarify/error.hpp"

namespace clarify {

namespace {

// Returns the placeholder name starting at `pos` (which holds '{'), or empty.
std::string placeholder_at(const std::string& body, std::size_t pos) {
  std::size_t end = pos + 1;
  while (end < body.size() && ((body[end] >= 'a' && body[end] <= 'z') || body[end] == '_')) ++end;
  if (end == pos + 1 || end >= body.size() || body[end] != '}') return {};
  return body.substr(pos + 1, end - pos - 1);
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  for (std::size_t pos = body.find('{'); pos != std::string::npos; pos = body.find('{', pos + 1)) {
    auto name = placeholder_at(body, pos);
    if (!name.empty() && std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
  }
  return names;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto open = body.find('{', pos);
    if (open == std::string::npos) break;
    const auto name = placeholder_at(body, open);
    if (name.empty()) {
      out.append(body, pos, open + 1 - pos);
      pos = open + 1;
      continue;
    }
    const auto it = values.find(name);
    if (it == values.end())
      throw ValidationError(fmt::format("prompt '{}' needs a value for placeholder '{}'", this->name, name));
    out.append(body, pos, open - pos);
    out.append(it->second);
    pos = open + name.size() + 2;
  }
  out.append(body, pos, std::string::npos);
  return out;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& dir, const std::string& name) {
  std::ifstream in(dir / name, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open prompt template {}", (dir / name).string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return PromptTemplate{name, buffer.str(), {}};
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  return PromptLibrary{PromptTemplate::load(dir, "question_t0"), PromptTemplate::load(dir, "question_tn"),
                       PromptTemplate::load(dir, "answer_sim"), PromptTemplate::load(dir, "summarize"),
                       PromptTemplate::load(dir, "label")};
}

}  // namespace clarify
