#include "rsagent/eval/format.hpp"

#include <algorithm>
#include <cstdio>

namespace rsagent::eval {

std::string format_percent(double fraction)
{
    if (fraction == 1.0) return "100%";
    if (fraction == 0.0) return "0%";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
    return buf;
}

std::string format_basis_points(int bp)
{
    if (bp == 10000) return "100%";
    if (bp == 0) return "0%";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%d.%02d%%", bp < 0 ? "-" : "", std::abs(bp) / 100, std::abs(bp) % 100);
    return buf;
}

std::string render_table(const std::vector<std::vector<std::string>>& rows)
{
    if (rows.empty()) return {};
    std::size_t cols = 0;
    for (const auto& r : rows) cols = std::max(cols, r.size());
    std::vector<std::size_t> width(cols, 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());

    auto line = [&](const std::vector<std::string>& r) {
        std::string out = "|";
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string cell = c < r.size() ? r[c] : "";
            out += " " + cell + std::string(width[c] - cell.size(), ' ') + " |";
        }
        return out + "\n";
    };
    std::string out = line(rows.front());
    out += "|";
    for (std::size_t c = 0; c < cols; ++c) out += std::string(width[c] + 2, '-') + "|";
    out += "\n";
    for (std::size_t i = 1; i < rows.size(); ++i) out += line(rows[i]);
    return out;
}

} // namespace rsagent::eval
