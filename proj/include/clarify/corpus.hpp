#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clarify/types.hpp"

namespace clarify {

struct Item {
  std::string id;
  std::string title;
  std::string author;
  std::string published;
  std::vector<std::pair<std::string, long>> genres;  // file order preserved
  std::string description;

  bool operator==(const Item&) const = default;
};

/// Immutable, ordered item collection with an id index.
class Corpus {
 public:
  Corpus() = default;

  /// Throws ValidationError on empty/duplicate ids, empty descriptions or negative genre counts.
  explicit Corpus(std::vector<Item> items);

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const Item& operator[](std::size_t pos) const { return items_[pos]; }
  const std::vector<Item>& items() const noexcept { return items_; }
  auto begin() const noexcept { return items_.begin(); }
  auto end() const noexcept { return items_.end(); }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws NotFoundError for unknown ids.
  std::size_t position_of(std::string_view id) const;

  bool operator==(const Corpus& other) const { return items_ == other.items_; }

 private:
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// JSON Lines; one object per line with id/title/author/published/genres/description.
/// Blank lines are skipped. Errors name the 1-based line number.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view jsonl);
std::string item_to_json_line(const Item& item);

/// "Name: count" pairs joined by "; ".
std::string format_genres(const Item& item);

/// Candidate block shown to the question generator:
/// title/author/published/genres/description/rank/probability, one key per line.
std::string render_candidate_context(const Item& item, std::size_t rank, double prob);

/// Item block shown to the user simulator: no title, no ranking information.
std::string render_item_for_answering(const Item& item);

/// Title recovered from a rendered candidate block, if it has one.
std::optional<std::string> title_from_context(std::string_view block);

struct RankedCandidate {
  const Item* item = nullptr;
  std::size_t rank = 0;
  double prob = 0.0;
};

/// Shortest descending-probability prefix with cumulative mass >= 0.5, capped at 3, at least 1.
std::vector<RankedCandidate> top_candidates(const BeliefDistribution& belief, const Corpus& corpus);

std::vector<std::string> render_contexts(const std::vector<RankedCandidate>& candidates);

}  // namespace clarify
