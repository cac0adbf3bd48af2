#include "rsagent/knowledge/quota.hpp"

#include "rsagent/error.hpp"

#include <algorithm>
#include <numeric>

namespace rsagent::knowledge {

QuotaAllocation allocate_quota(std::span<const WeightedKeyword> keywords, int total)
{
    if (total < 1) throw InputError("allocate_quota: N must be at least 1");
    if (keywords.empty()) throw InputError("allocate_quota: no keywords");
    for (const auto& k : keywords) validate(k);

    const std::int64_t weight_sum = std::accumulate(keywords.begin(), keywords.end(), std::int64_t{0},
                                                    [](std::int64_t acc, const auto& k) { return acc + k.weight; });

    QuotaAllocation out;
    out.total = total;
    std::vector<std::int64_t> remainder(keywords.size());
    int assigned = 0;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        const std::int64_t scaled = static_cast<std::int64_t>(keywords[i].weight) * total;
        const int floor_share = static_cast<int>(scaled / weight_sum);
        remainder[i] = scaled % weight_sum; // fractional part, in units of 1/weight_sum
        out.per_keyword.push_back({keywords[i].text, keywords[i].weight, floor_share});
        assigned += floor_share;
    }

    std::vector<std::size_t> order(keywords.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        if (keywords[a].weight != keywords[b].weight) return keywords[a].weight > keywords[b].weight;
        if (keywords[a].text != keywords[b].text) return keywords[a].text < keywords[b].text;
        return a < b;
    });
    for (int left = total - assigned, i = 0; left > 0; --left, ++i) ++out.per_keyword[order[i]].n;
    return out;
}

} // namespace rsagent::knowledge
