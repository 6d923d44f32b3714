#include <array>

#include "clarify/error.hpp"
#include "clarify/oracles.hpp"
#include "clarify/text.hpp"

namespace clarify {

namespace {

constexpr std::array<std::string_view, 8> kAuxiliaries{"is", "are", "does", "did", "was", "were", "can", "do"};
constexpr std::string_view kDontRemember = "I don't remember";

bool starts_with_auxiliary(std::string_view q) {
  return std::any_of(kAuxiliaries.begin(), kAuxiliaries.end(),
                     [&](std::string_view aux) { return text::istarts_with_word(q, aux); });
}

bool has_word(const std::vector<std::string>& tokens, std::string_view word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

std::string genre_names(const Item& item) {
  std::vector<std::string> names;
  for (const auto& [name, count] : item.genres) names.push_back(name);
  return text::join(names, ", ");
}

// Parsed "<aux> the <key> of the book <value>?".
struct BinaryTemplate {
  std::string key;
  std::string value;
};

// Also accepts the short form "<aux> the <key> <value>?" when <key> is one of `keys`.
std::optional<BinaryTemplate> parse_binary_template(std::string_view question, const std::vector<std::string>& keys) {
  auto q = text::trim(question);
  while (!q.empty() && (q.back() == '?' || std::isspace(static_cast<unsigned char>(q.back())))) q.remove_suffix(1);
  const auto lower = text::to_lower(q);
  for (auto aux : kAuxiliaries) {
    const std::string prefix = std::string(aux) + " the ";
    if (lower.rfind(prefix, 0) != 0) continue;
    BinaryTemplate t;
    if (const auto marker = lower.find(" of the book ", prefix.size()); marker != std::string::npos) {
      t.key = lower.substr(prefix.size(), marker - prefix.size());
      t.value = std::string(text::trim(q.substr(marker + 13)));
    } else {
      for (const auto& key : keys) {
        if (lower.compare(prefix.size(), key.size() + 1, key + " ") == 0) {
          t.key = key;
          t.value = std::string(text::trim(q.substr(prefix.size() + key.size() + 1)));
          break;
        }
      }
    }
    if (t.key.empty() || t.value.empty()) return std::nullopt;
    return t;
  }
  return std::nullopt;
}

// Text the mock consults for `key`, or nullopt when the item has no such field.
std::optional<std::string> field_text(const Item& item, std::string_view key) {
  if (key == "author") return item.author;
  if (key == "genre" || key == "genres") return genre_names(item);
  if (key == "published" || key == "publication date" || key == "date") return item.published;
  if (key == "description") return item.description;
  for (auto& [facet, value] : parse_facets(item.description)) {
    if (facet == key) return value;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_facets(std::string_view description) {
  std::vector<std::pair<std::string, std::string>> facets;
  std::size_t start = 0;
  while (start < description.size()) {
    std::size_t end = start;
    while (end < description.size()) {
      const char c = description[end];
      if ((c == '.' || c == '!' || c == '?') &&
          (end + 1 == description.size() || std::isspace(static_cast<unsigned char>(description[end + 1]))))
        break;
      ++end;
    }
    const auto sentence = text::trim(description.substr(start, end - start));
    const auto colon = sentence.find(':');
    if (colon != std::string_view::npos && colon > 0 && colon <= 30) {
      const auto key = text::trim(sentence.substr(0, colon));
      const auto value = text::trim(sentence.substr(colon + 1));
      const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == ' ';
      });
      if (key_ok && !value.empty()) facets.emplace_back(text::to_lower(key), std::string(value));
    }
    start = end + 1;
  }
  return facets;
}

// Generator ------------------------------------------------------------------

MockQuestionGenerator::MockQuestionGenerator(std::string style) : style_(std::move(style)) {
  if (style_ != "binary" && style_ != "open" && style_ != "mixed")
    throw ValidationError("mock question style must be binary, open or mixed");
}

CandidatePool MockQuestionGenerator::generate_pool(const InteractionHistory& history,
                                                   const std::vector<std::string>& candidate_blocks, int n) const {
  if (n < 1) throw ValidationError("pool size must be at least 1");
  std::vector<std::string> open;
  std::vector<std::string> binary;
  for (const auto& block : candidate_blocks) {
    for (const auto& line : text::split_lines(block)) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const auto key = line.substr(0, colon);
      const auto value = line.substr(colon + 2);
      if (key == "author" && !value.empty()) {
        open.push_back("Who is the author of the book?");
        binary.push_back("Is the author of the book " + value + "?");
      } else if (key == "published" && !value.empty()) {
        open.push_back("When was the book published?");
      } else if (key == "genres" && !value.empty()) {
        open.push_back("What genres does the book belong to?");
        for (const auto& part : text::split_lines(text::replace_all_icase(value, "; ", "\n"))) {
          const auto name = part.substr(0, part.rfind(':'));
          if (!name.empty()) binary.push_back("Is the genre of the book " + name + "?");
        }
      } else if (key == "description") {
        for (const auto& [facet, facet_value] : parse_facets(value)) {
          open.push_back("What is the " + facet + " of the book?");
          binary.push_back("Is the " + facet + " of the book " + facet_value + "?");
        }
      }
    }
  }
  std::vector<std::string> questions;
  if (style_ != "binary") questions.insert(questions.end(), open.begin(), open.end());
  if (style_ != "open") questions.insert(questions.end(), binary.begin(), binary.end());
  auto pool = filter_pool(questions, candidate_blocks, n, static_cast<int>(history.turns.size()) + 1);
  if (pool.empty()) throw OracleError("mock generator found no fields to ask about");
  return pool;
}

// Answerer -------------------------------------------------------------------

std::string MockAnswerer::answer(std::string_view question, const Item& item) const {
  std::vector<std::string> keys{"author", "genre", "genres", "published", "description"};
  for (auto& [facet, value] : parse_facets(item.description)) keys.push_back(facet);
  if (auto t = parse_binary_template(question, keys)) {
    const auto field = field_text(item, t->key);
    if (!field) return std::string(kDontRemember);
    return text::icontains(*field, t->value) ? "yes" : "no";
  }
  const auto tokens = text::tokenize(question);
  if (starts_with_auxiliary(question) && !has_word(tokens, "describe")) return std::string(kDontRemember);

  for (const auto& [facet, value] : parse_facets(item.description)) {
    const auto facet_tokens = text::tokenize(facet);
    const bool named = !facet_tokens.empty() && std::all_of(facet_tokens.begin(), facet_tokens.end(),
                                                            [&](const std::string& w) { return has_word(tokens, w); });
    if (named) return value;
  }
  if (has_word(tokens, "author") || has_word(tokens, "wrote")) return item.author;
  if (has_word(tokens, "genre") || has_word(tokens, "genres")) return genre_names(item);
  if (has_word(tokens, "published") || has_word(tokens, "publish") || has_word(tokens, "when"))
    return text::first_sentence(item.published);
  if (has_word(tokens, "describe") || has_word(tokens, "description") || has_word(tokens, "about") ||
      has_word(tokens, "plot"))
    return text::first_sentence(item.description);
  return std::string(kDontRemember);
}

// Summarizer and labeler -----------------------------------------------------

std::string MockSummarizer::condense(const std::vector<std::string>& texts) const {
  if (texts.empty()) throw ValidationError("nothing to condense");
  return text::join(texts, "; ");
}

QuestionType MockLabeler::label(std::string_view question) const {
  const auto lower = text::to_lower(question);
  if (lower.find("describe") != std::string::npos) return QuestionType::describe;
  if (lower.find("character") != std::string::npos) return QuestionType::character;
  if (lower.find("event") != std::string::npos || lower.find("happen") != std::string::npos)
    return QuestionType::event;
  if (starts_with_auxiliary(question)) return QuestionType::binary;
  return QuestionType::other;
}

}  // namespace clarify
