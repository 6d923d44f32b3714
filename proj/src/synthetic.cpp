#include "clarify/synthetic.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "clarify/embedding.hpp"
#include "clarify/rng.hpp"

namespace clarify {

const std::vector<BinaryAttribute>& synthetic_attributes() {
  static const std::vector<BinaryAttribute> attributes = {
      {"Setting", {"metropolis", "village"}},     {"Era", {"ancient", "futuristic"}},
      {"Protagonist", {"orphan", "princess"}},    {"Tone", {"humorous", "melancholy"}},
      {"Creature", {"dragon", "robot"}},          {"Ending", {"triumphant", "tragic"}},
      {"Journey", {"ocean", "desert"}},
  };
  return attributes;
}

int synthetic_value(std::size_t position, std::size_t attribute) {
  return static_cast<int>((position >> attribute) & 1U);
}

namespace {

constexpr std::size_t kLexicalDim = 256;

// Title numbers whose token lands in a value word's hash bucket would leak
// attribute evidence into retrieval, so they are skipped.
std::vector<std::string> title_numbers(std::size_t count) {
  std::unordered_set<std::uint64_t> taken;
  for (const auto& a : synthetic_attributes())
    for (const auto& v : a.values) taken.insert(fnv1a64(v) % kLexicalDim);
  std::vector<std::string> out;
  for (int n = 1; out.size() < count; ++n) {
    auto token = fmt::format("{:03d}", n);
    if (!taken.contains(fnv1a64(token) % kLexicalDim)) out.push_back(std::move(token));
  }
  return out;
}

}  // namespace

SyntheticWorld make_synthetic_world(std::size_t num_queries, std::uint64_t seed) {
  const auto& attributes = synthetic_attributes();
  const std::size_t n = std::size_t{1} << attributes.size();
  const auto numbers = title_numbers(n);

  std::vector<Item> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Item item;
    item.id = fmt::format("syn-{:03d}", i);
    item.title = "Synthetic Book " + numbers[i];
    item.author = "Unknown";
    item.published = "Published in 2000.";
    item.genres = {{"Fiction", 1}};
    item.description = "A synthetic story.";
    for (std::size_t a = 0; a < attributes.size(); ++a)
      item.description += fmt::format(" {}: {}.", attributes[a].key, attributes[a].values[synthetic_value(i, a)]);
    items.push_back(std::move(item));
  }

  Rng rng(derive_seed(seed, 0x5157));
  std::vector<QuerySpec> queries;
  queries.reserve(num_queries);
  for (std::size_t q = 0; q < num_queries; ++q) {
    const auto target = static_cast<std::size_t>(rng.index(n));
    const auto mentioned = 3 + rng.index(2);
    std::vector<std::size_t> order(attributes.size());
    for (std::size_t a = 0; a < order.size(); ++a) order[a] = a;
    for (std::size_t a = order.size() - 1; a > 0; --a) std::swap(order[a], order[rng.index(a + 1)]);
    order.resize(mentioned);
    std::sort(order.begin(), order.end());
    std::string words;
    for (auto a : order) {
      if (!words.empty()) words += ", ";
      words += attributes[a].values[synthetic_value(target, a)];
    }
    queries.push_back({fmt::format("q-{:03d}", q), fmt::format("I remember a story: {}.", words), items[target].id});
  }
  return {Corpus(std::move(items)), std::move(queries)};
}

}  // namespace clarify
