#include "clarify/corpus.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "clarify/error.hpp"
#include "clarify/text.hpp"

namespace clarify {

using nlohmann::json;

Corpus::Corpus(std::vector<Item> items) : items_(std::move(items)) {
  index_.reserve(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& item = items_[i];
    if (item.id.empty()) throw ValidationError(fmt::format("item at position {} has an empty id", i));
    if (text::trim(item.description).empty())
      throw ValidationError(fmt::format("item '{}' has an empty description", item.id));
    for (const auto& [genre, count] : item.genres) {
      if (count < 0) throw ValidationError(fmt::format("item '{}' genre '{}' has negative count", item.id, genre));
    }
    if (!index_.emplace(item.id, i).second) throw ValidationError(fmt::format("duplicate item id '{}'", item.id));
  }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::position_of(std::string_view id) const {
  if (auto pos = find(id)) return *pos;
  throw NotFoundError(fmt::format("unknown item id '{}'", id));
}

namespace {

Item item_from_json(const nlohmann::ordered_json& j) {
  Item item;
  item.id = j.at("id").get<std::string>();
  item.title = j.value("title", "");
  item.author = j.value("author", "");
  item.published = j.value("published", "");
  if (j.contains("genres")) {
    const auto& g = j.at("genres");
    if (!g.is_object()) throw ParseError("genres must be an object");
    for (const auto& [name, count] : g.items()) item.genres.emplace_back(name, count.get<long>());
  }
  item.description = j.at("description").get<std::string>();
  return item;
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl) {
  std::vector<Item> items;
  const auto lines = text::split_lines(jsonl);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (text::trim(lines[n]).empty()) continue;
    try {
      // Keep the file's key order for genres.
      items.push_back(item_from_json(nlohmann::ordered_json::parse(lines[n])));
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("corpus line {}: {}", n + 1, e.what()));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("corpus line {}: {}", n + 1, e.what()));
    }
  }
  return Corpus(std::move(items));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open corpus file {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str());
}

std::string item_to_json_line(const Item& item) {
  nlohmann::ordered_json genres = nlohmann::ordered_json::object();
  for (const auto& [name, count] : item.genres) genres[name] = count;
  nlohmann::ordered_json j;
  j["id"] = item.id;
  j["title"] = item.title;
  j["author"] = item.author;
  j["published"] = item.published;
  j["genres"] = std::move(genres);
  j["description"] = item.description;
  return j.dump();
}

std::string format_genres(const Item& item) {
  std::vector<std::string> parts;
  parts.reserve(item.genres.size());
  for (const auto& [name, count] : item.genres) parts.push_back(fmt::format("{}: {}", name, count));
  return text::join(parts, "; ");
}

std::string render_candidate_context(const Item& item, std::size_t rank, double prob) {
  return fmt::format("title: {}\nauthor: {}\npublished: {}\ngenres: {}\ndescription: {}\nrank: {}\nprobability: {:.4f}",
                     item.title, item.author, item.published, format_genres(item), item.description, rank, prob);
}

std::string render_item_for_answering(const Item& item) {
  return fmt::format("author: {}\npublished: {}\ngenres: {}\ndescription: {}", item.author, item.published,
                     format_genres(item), item.description);
}

std::optional<std::string> title_from_context(std::string_view block) {
  for (const auto& line : text::split_lines(block)) {
    if (line.rfind("title: ", 0) == 0) return line.substr(7);
  }
  return std::nullopt;
}

std::vector<RankedCandidate> top_candidates(const BeliefDistribution& belief, const Corpus& corpus) {
  if (belief.empty()) throw ValidationError("top_candidates: empty belief");
  if (belief.size() != corpus.size())
    throw ValidationError(fmt::format("belief size {} does not match corpus size {}", belief.size(), corpus.size()));
  const auto order = belief.ranking();
  std::vector<RankedCandidate> out;
  double mass = 0.0;
  for (std::size_t r = 0; r < order.size() && out.size() < 3; ++r) {
    const double p = belief[order[r]];
    out.push_back({&corpus[order[r]], r + 1, p});
    mass += p;
    if (mass >= 0.5) break;
  }
  return out;
}

std::vector<std::string> render_contexts(const std::vector<RankedCandidate>& candidates) {
  std::vector<std::string> blocks;
  blocks.reserve(candidates.size());
  for (const auto& c : candidates) blocks.push_back(render_candidate_context(*c.item, c.rank, c.prob));
  return blocks;
}

}  // namespace clarify
