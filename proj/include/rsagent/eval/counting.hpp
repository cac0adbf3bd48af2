#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rsagent::eval {

struct CountingRecord {
    std::int64_t gt = 0;
    std::int64_t p = 0;

    bool operator==(const CountingRecord&) const = default;
};

struct CountingMetrics {
    double absolute_accuracy = 0.0;
    double interval_accuracy = 0.0;
    double relative_error = 0.0; // e_r
    std::size_t n_cases = 0;
};

/// 0 -> 0, [1,10] -> 1, [11,100] -> 2, [101,1000] -> 3, >1000 -> 4.
int count_bucket(std::int64_t count);

/// Per-record term ln(1 + |gt - p| / max(gt, 1)).
double relative_error_term(const CountingRecord& r);

/// Exact-match fraction, same-bucket fraction and
/// e_r = (1/n) * sum ln(1 + |gt - p| / max(gt, 1)).
/// Terms are summed in ascending order so e_r does not depend on record
/// order. Throws InputError for an empty list or a negative count.
CountingMetrics counting_metrics(std::span<const CountingRecord> records);

/// JSONL {"gt", "p"} or CSV lines "gt,p" (a non-numeric header line is skipped).
std::vector<CountingRecord> parse_counting_records(const std::string& body);
std::vector<CountingRecord> load_counting_records(const std::string& path);

/// Method | Absolute Accuracy | Interval Match | Relative Error
std::string render_counting_table(const CountingMetrics& m, const std::string& method = "RS-Agent");
nlohmann::json to_json(const CountingMetrics& m);

} // namespace rsagent::eval
