#include "clarify/oracles.hpp"

#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "clarify/error.hpp"
#include "clarify/http_json.hpp"
#include "clarify/parallel.hpp"
#include "clarify/text.hpp"

namespace clarify {

std::vector<std::string> Answerer::answer_many(std::string_view question,
                                               const std::vector<const Item*>& items) const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto* item : items) out.push_back(answer(question, *item));
  return out;
}

namespace {

std::string strip_list_marker(std::string_view line) {
  line = text::trim(line);
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
    line.remove_prefix(i + 1);
  } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    line.remove_prefix(1);
  } else if (line.rfind("\xE2\x80\xA2", 0) == 0) {  // bullet
    line.remove_prefix(3);
  }
  return std::string(text::trim(line));
}

}  // namespace

std::vector<std::string> parse_generated_questions(std::string_view generated) {
  std::vector<std::string> out;
  for (const auto& raw : text::split_lines(generated)) {
    auto line = strip_list_marker(raw);
    if (line.empty()) continue;
    if (line.find('?') == std::string::npos && text::tokenize(line).size() < 4) continue;
    out.push_back(std::move(line));
  }
  return out;
}

CandidatePool filter_pool(const std::vector<std::string>& questions, const std::vector<std::string>& candidate_blocks,
                          int n, int turn) {
  std::vector<std::string> titles;
  for (const auto& block : candidate_blocks) {
    if (auto title = title_from_context(block); title && !text::trim(*title).empty())
      titles.emplace_back(text::trim(*title));
  }
  std::vector<std::string> kept;
  for (const auto& q : questions) {
    const bool names_title =
        std::any_of(titles.begin(), titles.end(), [&](const std::string& t) { return text::icontains(q, t); });
    if (!names_title) kept.push_back(q);
  }
  auto pool = make_pool(kept, turn);
  if (n >= 0 && pool.questions.size() > static_cast<std::size_t>(n)) pool.questions.resize(static_cast<std::size_t>(n));
  return pool;
}

std::string format_interactions(const std::vector<Turn>& turns) {
  std::vector<std::string> lines;
  for (const auto& t : turns) {
    lines.push_back("Q: " + t.question);
    lines.push_back("A: " + t.answer);
  }
  return text::join(lines, "\n");
}

std::string format_candidate_list(const std::vector<std::string>& candidate_blocks) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < candidate_blocks.size(); ++i)
    parts.push_back(fmt::format("[Book {}]\n{}", i, candidate_blocks[i]));
  return text::join(parts, "\n");
}

std::string redact_title(std::string_view answer, std::string_view title) {
  const auto t = text::trim(title);
  if (t.empty()) return std::string(answer);
  return text::replace_all_icase(answer, t, "[redacted]");
}

// Chat-backed ----------------------------------------------------------------

ChatQuestionGenerator::ChatQuestionGenerator(std::shared_ptr<const ChatClient> client, PromptLibrary prompts,
                                             double temperature)
    : client_(std::move(client)), prompts_(std::move(prompts)), temperature_(temperature) {}

std::string ChatQuestionGenerator::build_prompt(const InteractionHistory& history,
                                                const std::vector<std::string>& candidate_blocks) const {
  if (history.turns.empty()) {
    return prompts_.question_t0.render(
        {{"candidates", text::join(candidate_blocks, "\n")}, {"query", history.initial_query}});
  }
  return prompts_.question_tn.render({{"query", history.initial_query},
                                      {"candidates", format_candidate_list(candidate_blocks)},
                                      {"interactions", format_interactions(history.turns)}});
}

CandidatePool ChatQuestionGenerator::generate_pool(const InteractionHistory& history,
                                                   const std::vector<std::string>& candidate_blocks, int n) const {
  if (n < 1) throw ValidationError("pool size must be at least 1");
  const auto prompt = build_prompt(history, candidate_blocks);
  const int turn = static_cast<int>(history.turns.size()) + 1;
  std::vector<std::string> collected;
  CandidatePool pool;
  for (int attempt = 0; attempt < n; ++attempt) {
    std::string reply;
    try {
      reply = client_->complete({{"user", prompt}}, temperature_);
    } catch (const TransportError& e) {
      throw OracleError(fmt::format("question generation failed: {}", e.what()));
    }
    for (auto& q : parse_generated_questions(reply)) collected.push_back(std::move(q));
    pool = filter_pool(collected, candidate_blocks, n, turn);
    if (pool.questions.size() >= static_cast<std::size_t>(n)) break;
  }
  if (pool.empty()) throw OracleError("question generator returned no usable questions");
  return pool;
}

ChatAnswerer::ChatAnswerer(std::shared_ptr<const ChatClient> client, PromptLibrary prompts, int max_concurrency)
    : client_(std::move(client)), prompts_(std::move(prompts)), max_concurrency_(max_concurrency) {}

std::string ChatAnswerer::answer(std::string_view question, const Item& item) const {
  const auto prompt =
      prompts_.answer_sim.render({{"book", render_item_for_answering(item)}, {"question", std::string(question)}});
  std::string reply;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      reply = std::string(text::trim(client_->complete({{"user", prompt}}, 0.0)));
    } catch (const TransportError& e) {
      throw OracleError(fmt::format("answer simulation for '{}' failed: {}", item.id, e.what()));
    }
    if (item.title.empty() || !text::icontains(reply, item.title)) break;
  }
  reply = redact_title(reply, item.title);
  if (reply.empty()) throw OracleError(fmt::format("empty simulated answer for '{}'", item.id));
  return reply;
}

std::vector<std::string> ChatAnswerer::answer_many(std::string_view question,
                                                   const std::vector<const Item*>& items) const {
  std::vector<std::string> out(items.size());
  parallel_for(items.size(), max_concurrency_, [&](std::size_t i) { out[i] = answer(question, *items[i]); });
  return out;
}

ChatSummarizer::ChatSummarizer(std::shared_ptr<const ChatClient> client, PromptLibrary prompts)
    : client_(std::move(client)), prompts_(std::move(prompts)) {}

std::string ChatSummarizer::condense(const std::vector<std::string>& texts) const {
  if (texts.empty()) throw ValidationError("nothing to condense");
  const auto prompt = prompts_.summarize.render({{"texts", text::join(texts, "\n")}});
  std::string reply;
  try {
    reply = std::string(text::trim(client_->complete({{"user", prompt}}, 0.0)));
  } catch (const TransportError& e) {
    throw OracleError(fmt::format("summarizer failed: {}", e.what()));
  }
  if (reply.empty()) throw OracleError("summarizer returned an empty statement");
  std::size_t budget = 64;
  for (const auto& t : texts) budget += t.size();
  if (reply.size() > budget) {
    spdlog::warn("summarizer output of {} chars exceeds guard of {}; truncating", reply.size(), budget);
    reply.resize(budget);
  }
  return reply;
}

ChatLabeler::ChatLabeler(std::shared_ptr<const ChatClient> client, PromptLibrary prompts)
    : client_(std::move(client)), prompts_(std::move(prompts)) {}

QuestionType ChatLabeler::label(std::string_view question) const {
  try {
    const auto reply = client_->complete(
        {{"user", prompts_.label.render({{"question", std::string(question)}})}}, 0.0);
    const auto tokens = text::tokenize(reply);
    if (!tokens.empty()) return parse_question_type(tokens.front());
    spdlog::warn("labeler returned no category for '{}'", question);
  } catch (const std::exception& e) {
    spdlog::warn("labeling '{}' failed: {}", question, e.what());
  }
  return QuestionType::other;
}

// Memo -----------------------------------------------------------------------

MemoizingAnswerer::MemoizingAnswerer(std::shared_ptr<const Answerer> inner) : inner_(std::move(inner)) {}

namespace {
std::string memo_key(std::string_view question, const Item& item) {
  std::string key(question);
  key.push_back('\x1f');
  key.append(item.id);
  return key;
}
}  // namespace

std::string MemoizingAnswerer::answer(std::string_view question, const Item& item) const {
  const auto key = memo_key(question, item);
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  auto value = inner_->answer(question, item);
  std::lock_guard lock(mutex_);
  return memo_.emplace(key, std::move(value)).first->second;
}

std::vector<std::string> MemoizingAnswerer::answer_many(std::string_view question,
                                                        const std::vector<const Item*>& items) const {
  std::vector<std::string> out(items.size());
  std::vector<const Item*> missing;
  std::vector<std::size_t> missing_at;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (auto it = memo_.find(memo_key(question, *items[i])); it != memo_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(items[i]);
        missing_at.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  auto fresh = inner_->answer_many(question, missing);
  std::lock_guard lock(mutex_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    memo_.emplace(memo_key(question, *missing[k]), fresh[k]);
    out[missing_at[k]] = std::move(fresh[k]);
  }
  return out;
}

Oracles make_oracles(const OracleConfig& config) {
  if (config.backend == "mock") {
    return Oracles{std::make_shared<MockQuestionGenerator>(config.mock_style), std::make_shared<MockAnswerer>(),
                   std::make_shared<MockSummarizer>(), std::make_shared<MockLabeler>()};
  }
  if (config.backend != "http-chat") throw ValidationError(fmt::format("unknown oracle backend '{}'", config.backend));
  auto prompts = PromptLibrary::load(config.prompt_dir);
  auto client = std::make_shared<HttpChatClient>(config, api_key_from_env());
  return Oracles{std::make_shared<ChatQuestionGenerator>(client, prompts, config.temperature),
                 std::make_shared<MemoizingAnswerer>(
                     std::make_shared<ChatAnswerer>(client, prompts, config.max_concurrency)),
                 std::make_shared<ChatSummarizer>(client, prompts), std::make_shared<ChatLabeler>(client, prompts)};
}

// External question source ---------------------------------------------------

ExternalQuestionSource::ExternalQuestionSource(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

std::string ExternalQuestionSource::next_question(const InteractionHistory& history,
                                                  const std::vector<std::string>& candidate_blocks) const {
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& t : history.turns) turns.push_back({{"q", t.question}, {"a", t.answer}});
  nlohmann::json body{{"initial_query", history.initial_query}, {"turns", turns}, {"candidates", candidate_blocks}};
  HttpRequestOptions options;
  options.timeout = std::chrono::milliseconds(timeout_ms_);
  try {
    const auto reply = post_json(endpoint_, "/generate_question", body, options);
    auto question = std::string(text::trim(reply.at("question").get<std::string>()));
    if (question.empty()) throw OracleError("external generator returned an empty question");
    return question;
  } catch (const TransportError& e) {
    throw OracleError(fmt::format("external question generator failed: {}", e.what()));
  } catch (const nlohmann::json::exception& e) {
    throw OracleError(fmt::format("external question generator reply malformed: {}", e.what()));
  }
}

}  // namespace clarify
