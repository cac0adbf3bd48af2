#pragma once

#include "rsagent/knowledge/types.hpp"

#include <span>

namespace rsagent::knowledge {

/// Splits `total` documents across keywords in proportion to their weights.
///
/// Keyword i's exact share is w_i * total / sum(w). Each keyword first gets
/// the floor of its share; the leftover documents go one each to the largest
/// fractional remainders, ties broken by higher weight, then by keyword text,
/// then by input position. All arithmetic is integer, so the result is exact
/// and independent of keyword order.
///
/// Throws InputError when `keywords` is empty, a weight is outside [1, 10],
/// or total < 1.
QuotaAllocation allocate_quota(std::span<const WeightedKeyword> keywords, int total);

} // namespace rsagent::knowledge
