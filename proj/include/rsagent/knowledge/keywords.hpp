#pragma once

#include "rsagent/knowledge/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rsagent::knowledge {

/// Parses weighted keywords out of free-form model output or tool input.
///
/// Entries are separated by newlines, ';' or ','. Each entry is
/// "keyword: weight", "keyword - weight", "keyword (weight)" or a bare
/// keyword (weight `default_weight`). List bullets ("-", "*", "1.") and
/// surrounding quotes are stripped. A JSON array of {"keyword", "weight"}
/// objects is accepted too. Weights outside [1, 10] are clamped. Duplicate
/// keywords (case-insensitive) keep the first occurrence.
std::vector<WeightedKeyword> parse_weighted_keywords(std::string_view text, int default_weight = 1);

/// "kw1: w1; kw2: w2" - the form knowledge_search accepts as input.
std::string format_weighted_keywords(const std::vector<WeightedKeyword>& keywords);

} // namespace rsagent::knowledge
