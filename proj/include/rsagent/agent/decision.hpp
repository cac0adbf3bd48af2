#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rsagent::agent {

/// One planner step: call a tool or answer.
struct PlannerDecision {
    enum class Kind { InvokeTool, FinalAnswer };

    Kind kind = Kind::FinalAnswer;
    std::string tool_name;
    std::string tool_input;
    std::string answer;

    static PlannerDecision invoke(std::string tool, std::string input)
    {
        return {Kind::InvokeTool, std::move(tool), std::move(input), {}};
    }
    static PlannerDecision final_answer(std::string text) { return {Kind::FinalAnswer, {}, {}, std::move(text)}; }

    bool operator==(const PlannerDecision&) const = default;
};

/// Reads the reply envelope
///   TOOL: <name> | INPUT: <text>
///   ANSWER: <text>
/// Keywords are case-insensitive and may be surrounded by whitespace or
/// markdown emphasis; the first line starting with either keyword wins.
/// An ANSWER keeps every line after it. Returns nullopt when neither form
/// is present or the tool name / answer is empty.
std::optional<PlannerDecision> parse_decision(std::string_view reply);

/// Canonical envelope for a decision.
std::string format_decision(const PlannerDecision& decision);

} // namespace rsagent::agent
