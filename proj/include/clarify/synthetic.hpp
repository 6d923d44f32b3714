#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "clarify/corpus.hpp"
#include "clarify/harness.hpp"

namespace clarify {

/// A facet with two possible values, written into descriptions as "Key: value."
struct BinaryAttribute {
  std::string key;
  std::array<std::string, 2> values;
};

/// The seven attributes of the synthetic world.
const std::vector<BinaryAttribute>& synthetic_attributes();

struct SyntheticWorld {
  Corpus corpus;
  std::vector<QuerySpec> queries;
};

/// 2^7 items, one per attribute combination (item i takes value bit k of i for
/// attribute k), and `num_queries` queries naming 3 or 4 of a random target's
/// values. Titles and authors carry no attribute information.
SyntheticWorld make_synthetic_world(std::size_t num_queries, std::uint64_t seed);

/// Value index of `attribute` for the item at `position`.
int synthetic_value(std::size_t position, std::size_t attribute);

}  // namespace clarify
