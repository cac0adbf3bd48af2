#pragma once

#include <string>
#include <vector>

namespace rsagent::eval {

/// Percent cell in the style of the published tables: "100%" and "0%" for
/// exact values, two decimals otherwise ("95.68%").
std::string format_percent(double fraction);

/// Same, from basis points (1/100 of a percent): 5800 -> "58.00%".
std::string format_basis_points(int bp);

/// Fixed-width text table; the first row is the header.
std::string render_table(const std::vector<std::vector<std::string>>& rows);

} // namespace rsagent::eval
