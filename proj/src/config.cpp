#include "clarify/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clarify/error.hpp"
#include "clarify/text.hpp"

namespace clarify {

using nlohmann::json;

std::string_view to_string(KeepRule rule) { return rule == KeepRule::top10 ? "top10" : "delta"; }

KeepRule parse_keep_rule(std::string_view t) {
  const auto s = text::to_lower(text::trim(t));
  if (s == "top10") return KeepRule::top10;
  if (s == "delta") return KeepRule::delta;
  throw ValidationError(fmt::format("unknown keep rule '{}'", t));
}

namespace {

using Setter = std::function<void(const json&)>;

template <typename T>
Setter assign(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

template <typename E, typename Parse>
Setter assign_enum(E& field, Parse parse) {
  return [&field, parse](const json& v) { field = parse(v.get<std::string>()); };
}

void apply_section(const json& section, std::string_view name, const std::map<std::string, Setter>& setters) {
  if (!section.is_object()) throw ValidationError(fmt::format("config section '{}' must be an object", name));
  for (const auto& [key, value] : section.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError(fmt::format("unknown config key '{}.{}'", name, key));
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ValidationError(fmt::format("config key '{}.{}': {}", name, key, e.what()));
    }
  }
}

}  // namespace

void Config::validate() const {
  auto require = [](bool ok, std::string_view what) {
    if (!ok) throw ValidationError(fmt::format("invalid config: {}", what));
  };
  require(retriever.backend == "lexical" || retriever.backend == "http", "retriever.backend");
  require(retriever.dim > 0, "retriever.dim must be positive");
  require(retriever.temperature > 0, "retriever.temperature must be positive");
  require(retriever.batch_size > 0, "retriever.batch_size must be positive");
  require(posterior.likelihood_floor >= 0 && posterior.likelihood_floor < 1, "posterior.likelihood_floor in [0,1)");
  require(posterior.answer_weight >= 1, "posterior.answer_weight >= 1");
  require(selection.top_k >= 0, "selection.top_k >= 0");
  require(selection.pool_size >= 1, "selection.pool_size >= 1");
  require(oracles.backend == "mock" || oracles.backend == "http-chat", "oracles.backend");
  require(oracles.temperature >= 0, "oracles.temperature >= 0");
  require(oracles.max_concurrency >= 1, "oracles.max_concurrency >= 1");
  require(oracles.retries >= 0, "oracles.retries >= 0");
  require(oracles.mock_style == "binary" || oracles.mock_style == "open" || oracles.mock_style == "mixed",
          "oracles.mock_style");
  require(game.max_turns >= 1, "game.max_turns >= 1");
  require(game.corruption >= 0 && game.corruption <= 1, "game.corruption in [0,1]");
  require(game.workers >= 1, "game.workers >= 1");
  require(synthesis.games_per_query >= 1, "synthesis.games_per_query >= 1");
  require(service.pool_size >= 1, "service.pool_size >= 1");
}

Config config_from_json(const json& j) {
  Config c;
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  const std::map<std::string, std::map<std::string, Setter>> sections{
      {"retriever",
       {{"backend", assign(c.retriever.backend)},
        {"dim", assign(c.retriever.dim)},
        {"temperature", assign(c.retriever.temperature)},
        {"endpoint", assign(c.retriever.endpoint)},
        {"batch_size", assign(c.retriever.batch_size)}}},
      {"posterior",
       {{"mode", assign_enum(c.posterior.mode, parse_posterior_mode)},
        {"likelihood_floor", assign(c.posterior.likelihood_floor)},
        {"answer_weight", assign(c.posterior.answer_weight)}}},
      {"selection",
       {{"kind", assign_enum(c.selection.kind, parse_selector_kind)},
        {"top_k", assign(c.selection.top_k)},
        {"pool_size", assign(c.selection.pool_size)},
        {"kl_mean_cosine", assign(c.selection.kl_mean_cosine)},
        {"endpoint", assign(c.selection.endpoint)}}},
      {"oracles",
       {{"backend", assign(c.oracles.backend)},
        {"endpoint", assign(c.oracles.endpoint)},
        {"model", assign(c.oracles.model)},
        {"temperature", assign(c.oracles.temperature)},
        {"max_concurrency", assign(c.oracles.max_concurrency)},
        {"timeout_ms", assign(c.oracles.timeout_ms)},
        {"retries", assign(c.oracles.retries)},
        {"backoff_ms", assign(c.oracles.backoff_ms)},
        {"prompt_dir", assign(c.oracles.prompt_dir)},
        {"mock_style", assign(c.oracles.mock_style)}}},
      {"game",
       {{"max_turns", assign(c.game.max_turns)},
        {"corruption", assign(c.game.corruption)},
        {"workers", assign(c.game.workers)}}},
      {"synthesis",
       {{"games_per_query", assign(c.synthesis.games_per_query)},
        {"rule", assign_enum(c.synthesis.rule, parse_keep_rule)},
        {"mode", assign_enum(c.synthesis.mode, parse_posterior_mode)}}},
      {"service",
       {{"port", assign(c.service.port)},
        {"data_dir", assign(c.service.data_dir)},
        {"webui_dir", assign(c.service.webui_dir)},
        {"selector", assign_enum(c.service.selector, parse_selector_kind)},
        {"pool_size", assign(c.service.pool_size)}}},
  };
  for (const auto& [name, section] : j.items()) {
    const auto it = sections.find(name);
    if (it == sections.end()) throw ValidationError(fmt::format("unknown config section '{}'", name));
    apply_section(section, name, it->second);
  }
  c.validate();
  return c;
}

json config_to_json(const Config& c) {
  return json{
      {"retriever",
       {{"backend", c.retriever.backend},
        {"dim", c.retriever.dim},
        {"temperature", c.retriever.temperature},
        {"endpoint", c.retriever.endpoint},
        {"batch_size", c.retriever.batch_size}}},
      {"posterior",
       {{"mode", to_string(c.posterior.mode)},
        {"likelihood_floor", c.posterior.likelihood_floor},
        {"answer_weight", c.posterior.answer_weight}}},
      {"selection",
       {{"kind", to_string(c.selection.kind)},
        {"top_k", c.selection.top_k},
        {"pool_size", c.selection.pool_size},
        {"kl_mean_cosine", c.selection.kl_mean_cosine},
        {"endpoint", c.selection.endpoint}}},
      {"oracles",
       {{"backend", c.oracles.backend},
        {"endpoint", c.oracles.endpoint},
        {"model", c.oracles.model},
        {"temperature", c.oracles.temperature},
        {"max_concurrency", c.oracles.max_concurrency},
        {"timeout_ms", c.oracles.timeout_ms},
        {"retries", c.oracles.retries},
        {"backoff_ms", c.oracles.backoff_ms},
        {"prompt_dir", c.oracles.prompt_dir},
        {"mock_style", c.oracles.mock_style}}},
      {"game", {{"max_turns", c.game.max_turns}, {"corruption", c.game.corruption}, {"workers", c.game.workers}}},
      {"synthesis",
       {{"games_per_query", c.synthesis.games_per_query},
        {"rule", to_string(c.synthesis.rule)},
        {"mode", to_string(c.synthesis.mode)}}},
      {"service",
       {{"port", c.service.port},
        {"data_dir", c.service.data_dir},
        {"webui_dir", c.service.webui_dir},
        {"selector", to_string(c.service.selector)},
        {"pool_size", c.service.pool_size}}},
  };
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open config file {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("config {}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

}  // namespace clarify
