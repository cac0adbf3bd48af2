#include "rsagent/knowledge/keywords.hpp"

#include "rsagent/text.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace rsagent::knowledge {

namespace {

// "8", "8/10", "7.5" -> clamped integer weight.
std::optional<int> parse_weight(std::string_view s)
{
    s = text::trim(s);
    if (auto slash = s.find('/'); slash != std::string_view::npos) s = text::trim(s.substr(0, slash));
    if (s.empty() || s.size() > 8) return std::nullopt;
    bool dot = false;
    for (char c : s) {
        if (c == '.' && !dot) {
            dot = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
    }
    if (s.front() == '.' || s.back() == '.') return std::nullopt;
    double v = std::stod(std::string(s));
    return std::clamp(static_cast<int>(std::floor(v + 0.5)), 1, 10);
}

std::string_view strip_bullet(std::string_view s)
{
    s = text::trim(s);
    if (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '+')) return text::trim(s.substr(1));
    std::size_t i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') return text::trim(s.substr(i + 2));
    return s;
}

std::string_view strip_quotes(std::string_view s)
{
    s = text::trim(s);
    while (s.size() >= 2 && (s.front() == '"' || s.front() == '\'' || s.front() == '`') && s.back() == s.front())
        s = text::trim(s.substr(1, s.size() - 2));
    return s;
}

std::optional<WeightedKeyword> parse_entry(std::string_view entry, int default_weight)
{
    entry = strip_bullet(entry);
    if (entry.empty()) return std::nullopt;

    std::string_view kw = entry;
    int weight = default_weight;
    if (entry.back() == ')') {
        if (auto open = entry.rfind('('); open != std::string_view::npos)
            if (auto w = parse_weight(entry.substr(open + 1, entry.size() - open - 2))) {
                kw = entry.substr(0, open);
                weight = *w;
            }
    }
    if (kw == entry) {
        for (std::string_view sep : {std::string_view(":"), std::string_view(" - "), std::string_view("=")}) {
            auto pos = entry.rfind(sep);
            if (pos == std::string_view::npos) continue;
            if (auto w = parse_weight(entry.substr(pos + sep.size()))) {
                kw = entry.substr(0, pos);
                weight = *w;
                break;
            }
        }
    }
    kw = strip_quotes(kw);
    if (kw.empty() || text::tokenize(kw).empty()) return std::nullopt;
    return WeightedKeyword{std::string(kw), std::clamp(weight, 1, 10)};
}

} // namespace

std::vector<WeightedKeyword> parse_weighted_keywords(std::string_view input, int default_weight)
{
    std::vector<WeightedKeyword> out;
    std::set<std::string> seen;
    auto push = [&](WeightedKeyword k) {
        if (seen.insert(text::to_lower(k.text)).second) out.push_back(std::move(k));
    };

    auto trimmed = text::trim(input);
    if (!trimmed.empty() && trimmed.front() == '[') {
        try {
            auto j = nlohmann::json::parse(trimmed);
            for (const auto& item : j) {
                if (!item.is_object()) continue;
                auto kw = item.value("keyword", item.value("text", std::string{}));
                if (text::trim(kw).empty() || text::tokenize(kw).empty()) continue;
                int w = default_weight;
                if (item.contains("weight") && item["weight"].is_number())
                    w = static_cast<int>(std::floor(item["weight"].get<double>() + 0.5));
                push({std::string(text::trim(kw)), std::clamp(w, 1, 10)});
            }
            return out;
        } catch (const nlohmann::json::exception&) {
            // fall through to the line grammar
        }
    }

    std::string entry;
    auto flush = [&] {
        if (auto k = parse_entry(entry, default_weight)) push(std::move(*k));
        entry.clear();
    };
    for (char c : input) {
        if (c == '\n' || c == ';' || c == ',')
            flush();
        else
            entry.push_back(c);
    }
    flush();
    return out;
}

std::string format_weighted_keywords(const std::vector<WeightedKeyword>& keywords)
{
    std::vector<std::string> parts;
    for (const auto& k : keywords) parts.push_back(k.text + ": " + std::to_string(k.weight));
    return text::join(parts, "; ");
}

} // namespace rsagent::knowledge
