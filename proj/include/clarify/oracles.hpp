#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clarify/chat_client.hpp"
#include "clarify/config.hpp"
#include "clarify/corpus.hpp"
#include "clarify/prompt.hpp"
#include "clarify/types.hpp"

namespace clarify {

// The three generative roles plus the analysis-only labeler. All implementations
// are stateless from the caller's point of view and safe to share across threads.

class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  /// Up to `n` distinct questions; never mentions a candidate title.
  /// Throws OracleError when nothing usable comes back.
  virtual CandidatePool generate_pool(const InteractionHistory& history,
                                      const std::vector<std::string>& candidate_blocks, int n) const = 0;
};

class Answerer {
 public:
  virtual ~Answerer() = default;
  /// Answers `question` as a user who has (vaguely) read `item`.
  virtual std::string answer(std::string_view question, const Item& item) const = 0;
  /// One answer per item, in order. Remote backends fan out concurrently.
  virtual std::vector<std::string> answer_many(std::string_view question, const std::vector<const Item*>& items) const;
};

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  /// Single non-empty statement condensing `texts` (non-empty).
  virtual std::string condense(const std::vector<std::string>& texts) const = 0;
};

class QuestionLabeler {
 public:
  virtual ~QuestionLabeler() = default;
  virtual QuestionType label(std::string_view question) const = 0;
};

// Shared post-processing -----------------------------------------------------

/// Splits generated text into questions: strips list markers, drops blank lines
/// and lines with no '?' and fewer than 4 tokens.
std::vector<std::string> parse_generated_questions(std::string_view text);

/// Removes questions naming any candidate title (case-insensitive), dedupes, caps at n.
CandidatePool filter_pool(const std::vector<std::string>& questions, const std::vector<std::string>& candidate_blocks,
                          int n, int turn);

std::string format_interactions(const std::vector<Turn>& turns);
std::string format_candidate_list(const std::vector<std::string>& candidate_blocks);

/// Replaces every case-insensitive occurrence of the title; no-op for empty titles.
std::string redact_title(std::string_view answer, std::string_view title);

// Chat-backed implementations ------------------------------------------------

class ChatQuestionGenerator final : public QuestionGenerator {
 public:
  ChatQuestionGenerator(std::shared_ptr<const ChatClient> client, PromptLibrary prompts, double temperature);
  CandidatePool generate_pool(const InteractionHistory& history, const std::vector<std::string>& candidate_blocks,
                              int n) const override;
  /// The prompt that would be sent for this history (t=0 vs t>0 template).
  std::string build_prompt(const InteractionHistory& history, const std::vector<std::string>& candidate_blocks) const;

 private:
  std::shared_ptr<const ChatClient> client_;
  PromptLibrary prompts_;
  double temperature_;
};

class ChatAnswerer final : public Answerer {
 public:
  ChatAnswerer(std::shared_ptr<const ChatClient> client, PromptLibrary prompts, int max_concurrency);
  std::string answer(std::string_view question, const Item& item) const override;
  std::vector<std::string> answer_many(std::string_view question,
                                       const std::vector<const Item*>& items) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  PromptLibrary prompts_;
  int max_concurrency_;
};

class ChatSummarizer final : public Summarizer {
 public:
  ChatSummarizer(std::shared_ptr<const ChatClient> client, PromptLibrary prompts);
  std::string condense(const std::vector<std::string>& texts) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  PromptLibrary prompts_;
};

class ChatLabeler final : public QuestionLabeler {
 public:
  ChatLabeler(std::shared_ptr<const ChatClient> client, PromptLibrary prompts);
  QuestionType label(std::string_view question) const override;

 private:
  std::shared_ptr<const ChatClient> client_;
  PromptLibrary prompts_;
};

// Deterministic mocks --------------------------------------------------------

/// "Key: value." sentences in a description, keys lowercased, in text order.
std::vector<std::pair<std::string, std::string>> parse_facets(std::string_view description);

/// Template questions over the fields of the candidate blocks.
///   binary: "Is the {field} of the book {value}?" (author, genres, description facets)
///   open:   "What is the {key} of the book?" plus author/genre/publication questions
///   mixed:  open questions followed by binary ones
class MockQuestionGenerator final : public QuestionGenerator {
 public:
  explicit MockQuestionGenerator(std::string style = "binary");
  CandidatePool generate_pool(const InteractionHistory& history, const std::vector<std::string>& candidate_blocks,
                              int n) const override;

 private:
  std::string style_;
};

/// Field-echo answerer. Template yes/no questions are checked by substring match;
/// open questions return the value of the facet or field they name; anything
/// else is "I don't remember". Titles are never consulted.
class MockAnswerer final : public Answerer {
 public:
  std::string answer(std::string_view question, const Item& item) const override;
};

/// Joins the texts with "; ".
class MockSummarizer final : public Summarizer {
 public:
  std::string condense(const std::vector<std::string>& texts) const override;
};

/// Keyword rules, first match wins: describe > character > event > binary > other.
class MockLabeler final : public QuestionLabeler {
 public:
  QuestionType label(std::string_view question) const override;
};

/// Per-run memo over (question, item id). Safe for deterministic answerers only.
class MemoizingAnswerer final : public Answerer {
 public:
  explicit MemoizingAnswerer(std::shared_ptr<const Answerer> inner);
  std::string answer(std::string_view question, const Item& item) const override;
  std::vector<std::string> answer_many(std::string_view question,
                                       const std::vector<const Item*>& items) const override;

 private:
  std::shared_ptr<const Answerer> inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::string> memo_;
};

struct Oracles {
  std::shared_ptr<const QuestionGenerator> generator;
  std::shared_ptr<const Answerer> answerer;
  std::shared_ptr<const Summarizer> summarizer;
  std::shared_ptr<const QuestionLabeler> labeler;
};

/// Mocks for backend "mock"; chat-backed roles (sharing one client) for "http-chat".
Oracles make_oracles(const OracleConfig& config);

/// Client for a learned question generator:
/// POST {endpoint}/generate_question {initial_query, turns, candidates} -> {question}.
class ExternalQuestionSource {
 public:
  ExternalQuestionSource(std::string endpoint, int timeout_ms);
  std::string next_question(const InteractionHistory& history, const std::vector<std::string>& candidate_blocks) const;

 private:
  std::string endpoint_;
  int timeout_ms_;
};

}  // namespace clarify
