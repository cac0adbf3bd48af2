#include "rsagent/agent/decision.hpp"

#include "rsagent/text.hpp"

#include <vector>

namespace rsagent::agent {

namespace {

std::string_view strip_emphasis(std::string_view s)
{
    s = text::trim(s);
    while (!s.empty() && (s.front() == '*' || s.front() == '_' || s.front() == '`')) s.remove_prefix(1);
    return text::trim(s);
}

// "KEY:" at the start of `line`, ignoring case, emphasis and spaces before the colon.
std::optional<std::string_view> after_key(std::string_view line, std::string_view key)
{
    line = strip_emphasis(line);
    if (!text::istarts_with(line, key)) return std::nullopt;
    line.remove_prefix(key.size());
    while (!line.empty() && (line.front() == ' ' || line.front() == '*' || line.front() == '_')) line.remove_prefix(1);
    if (line.empty() || line.front() != ':') return std::nullopt;
    line.remove_prefix(1);
    while (!line.empty() && (line.front() == '*' || line.front() == '_')) line.remove_prefix(1);
    return text::trim(line);
}

std::string_view strip_wrapping(std::string_view s)
{
    s = text::trim(s);
    while (s.size() >= 2 && (s.front() == '`' || s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        s = text::trim(s.substr(1, s.size() - 2));
    return s;
}

} // namespace

std::optional<PlannerDecision> parse_decision(std::string_view reply)
{
    auto lines = text::split_lines(reply);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (auto rest = after_key(lines[i], "ANSWER")) {
            std::vector<std::string> parts{std::string(*rest)};
            for (std::size_t j = i + 1; j < lines.size(); ++j) parts.push_back(lines[j]);
            auto answer = std::string(text::trim(text::join(parts, "\n")));
            if (answer.empty()) return std::nullopt;
            return PlannerDecision::final_answer(std::move(answer));
        }
        if (auto rest = after_key(lines[i], "TOOL")) {
            std::string_view name = *rest;
            std::string_view input;
            // "| INPUT:" on the same line, or "INPUT:" on the next one.
            if (auto bar = name.find('|'); bar != std::string_view::npos) {
                auto tail = name.substr(bar + 1);
                name = name.substr(0, bar);
                if (auto in = after_key(tail, "INPUT")) input = *in;
                else input = text::trim(tail);
            } else if (i + 1 < lines.size()) {
                if (auto in = after_key(lines[i + 1], "INPUT")) input = *in;
            }
            name = strip_wrapping(name);
            if (name.empty()) return std::nullopt;
            return PlannerDecision::invoke(std::string(name), std::string(strip_wrapping(input)));
        }
    }
    return std::nullopt;
}

std::string format_decision(const PlannerDecision& decision)
{
    if (decision.kind == PlannerDecision::Kind::FinalAnswer) return "ANSWER: " + decision.answer;
    return "TOOL: " + decision.tool_name + " | INPUT: " + decision.tool_input;
}

} // namespace rsagent::agent
