#pragma once

#include "rsagent/knowledge/types.hpp"
#include "rsagent/tools/tool.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rsagent::agent {

struct TaskInferred {
    std::string task_type;
    std::string raw_reply;
    bool normalized = false; // reply was not an exact label

    bool operator==(const TaskInferred&) const = default;
};

struct SolutionRetrieved {
    std::string query;     // what was embedded: the inferred label, or Q when inference is off
    std::string task_type; // the retrieved document's label
    std::string guidance;
    std::vector<std::string> tools;
    double score = 0.0;

    bool operator==(const SolutionRetrieved&) const = default;
};

struct ToolInvoked {
    std::string name; // as the planner wrote it
    tools::ToolInput input;
    std::optional<tools::ToolOutput> output;
    std::optional<std::string> error;

    bool operator==(const ToolInvoked&) const = default;
};

struct KnowledgeRetrieved {
    std::vector<knowledge::WeightedKeyword> keywords;
    knowledge::KnowledgeGuidance guidance;

    bool operator==(const KnowledgeRetrieved&) const = default;
};

struct FinalAnswer {
    std::string text;
    std::optional<std::string> image_ref;

    bool operator==(const FinalAnswer&) const = default;
};

using TraceEvent = std::variant<TaskInferred, SolutionRetrieved, ToolInvoked, KnowledgeRetrieved, FinalAnswer>;

/// Wire tag of an event: task_inferred, solution_retrieved, tool_invoked,
/// knowledge_retrieved or final_answer.
std::string_view event_kind(const TraceEvent& event);

/// {"kind": ..., ...event fields}
nlohmann::json to_json(const TraceEvent& event);
TraceEvent event_from_json(const nlohmann::json& j);

struct AgentTrace {
    std::vector<TraceEvent> events;

    bool operator==(const AgentTrace&) const = default;
};

nlohmann::json to_json(const AgentTrace& trace);
AgentTrace trace_from_json(const nlohmann::json& j);

/// Name of the first ToolInvoked event, if any.
std::optional<std::string> first_tool(const AgentTrace& trace);

/// Checks the ordering rules: at most one TaskInferred, which comes first;
/// SolutionRetrieved before every ToolInvoked; exactly one FinalAnswer, last.
/// Returns a description of the first violation.
std::optional<std::string> check_trace(const AgentTrace& trace);

} // namespace rsagent::agent
