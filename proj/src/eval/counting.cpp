#include "rsagent/eval/counting.hpp"

#include "rsagent/error.hpp"
#include "rsagent/eval/format.hpp"
#include "rsagent/text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace rsagent::eval {

using nlohmann::json;

int count_bucket(std::int64_t count)
{
    if (count < 0) throw InputError("negative count");
    if (count == 0) return 0;
    if (count <= 10) return 1;
    if (count <= 100) return 2;
    if (count <= 1000) return 3;
    return 4;
}

double relative_error_term(const CountingRecord& r)
{
    const double diff = static_cast<double>(r.gt > r.p ? r.gt - r.p : r.p - r.gt);
    return std::log1p(diff / static_cast<double>(std::max<std::int64_t>(r.gt, 1)));
}

CountingMetrics counting_metrics(std::span<const CountingRecord> records)
{
    if (records.empty()) throw InputError("counting_metrics: no records");
    std::size_t exact = 0;
    std::size_t same_bucket = 0;
    std::vector<double> terms;
    terms.reserve(records.size());
    for (const auto& r : records) {
        if (r.gt < 0 || r.p < 0) throw InputError("counting_metrics: negative count");
        if (r.gt == r.p) ++exact;
        if (count_bucket(r.gt) == count_bucket(r.p)) ++same_bucket;
        terms.push_back(relative_error_term(r));
    }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;

    const auto n = static_cast<double>(records.size());
    return {static_cast<double>(exact) / n, static_cast<double>(same_bucket) / n, sum / n, records.size()};
}

std::vector<CountingRecord> parse_counting_records(const std::string& body)
{
    std::vector<CountingRecord> out;
    int line_no = 0;
    auto parse_int = [&](std::string_view s) {
        s = text::trim(s);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw InputError("counting records line " + std::to_string(line_no) + ": not an integer: " + std::string(s));
        return v;
    };
    for (const auto& raw : text::split_lines(body)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '{') {
            try {
                auto j = json::parse(line);
                out.push_back({j.at("gt").get<std::int64_t>(), j.at("p").get<std::int64_t>()});
            } catch (const json::exception& e) {
                throw InputError("counting records line " + std::to_string(line_no) + ": " + e.what());
            }
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw InputError("counting records line " + std::to_string(line_no) + ": expected gt,p");
        if (out.empty() && !text::tokenize(line).empty() && !std::isdigit(static_cast<unsigned char>(text::trim(line)[0])))
            continue; // header
        out.push_back({parse_int(line.substr(0, comma)), parse_int(line.substr(comma + 1))});
    }
    return out;
}

std::vector<CountingRecord> load_counting_records(const std::string& path)
{
    return parse_counting_records(text::read_file(path));
}

std::string render_counting_table(const CountingMetrics& m, const std::string& method)
{
    char er[32];
    std::snprintf(er, sizeof er, "%.2f", m.relative_error);
    return render_table({{"Method", "Absolute Accuracy", "Interval Match", "Relative Error"},
                         {method, format_percent(m.absolute_accuracy), format_percent(m.interval_accuracy), er}}) +
           "Relative error uses the natural logarithm; records with gt = 0 divide by 1. n = " +
           std::to_string(m.n_cases) + "\n";
}

json to_json(const CountingMetrics& m)
{
    return {{"absolute_accuracy", m.absolute_accuracy},
            {"interval_accuracy", m.interval_accuracy},
            {"relative_error", m.relative_error},
            {"n_cases", m.n_cases},
            {"log_base", "e"}};
}

} // namespace rsagent::eval
