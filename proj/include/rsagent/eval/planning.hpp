#pragma once

#include "rsagent/agent/controller.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsagent::eval {

struct PlanningCase {
    std::string query;
    std::string expected_first_tool;
    std::string task_label;
    std::optional<std::string> image; // image store ref or file path, resolved by the agent

    bool operator==(const PlanningCase&) const = default;
};

struct PlanningOutcome {
    PlanningCase planning_case;
    std::optional<std::string> first_tool;
    bool correct = false;
    std::optional<std::string> error;
    std::optional<agent::AgentTrace> trace;
};

struct TaskAccuracy {
    std::string task_label;
    std::size_t correct = 0;
    std::size_t total = 0;
    double accuracy = 0.0;
};

struct PlanningReport {
    std::vector<TaskAccuracy> per_task; // order of first appearance in the case list
    double average = 0.0;               // unweighted mean over tasks
    std::vector<PlanningOutcome> outcomes;
};

/// Runs one case and returns its trace. Exceptions count as an incorrect case.
using PlanningAgent = std::function<agent::AgentTrace(const PlanningCase&)>;

/// JSONL: {"query", "expected_first_tool", "task_label", "image"?}
std::vector<PlanningCase> load_planning_cases(const std::string& path);
std::vector<PlanningCase> parse_planning_cases(const std::string& jsonl);

/// First-tool accuracy. A case is correct when the first ToolInvoked event
/// names the expected tool. Up to `parallelism` cases run at once; the
/// report does not depend on completion order. Throws InputError when
/// `cases` is empty.
PlanningReport eval_task_planning(std::span<const PlanningCase> cases, const PlanningAgent& agent,
                                  std::size_t parallelism = 1);

/// Agent backed by a controller: each case runs in a fresh session.
/// `resolve_image` maps PlanningCase::image to an image store ref.
PlanningAgent controller_agent(const agent::Controller& controller, agent::SessionFlags flags,
                               std::function<std::string(const std::string&)> resolve_image = {});

/// Task | <column> table with an "Average Accuracy" row.
std::string render_planning_table(const PlanningReport& report, const std::string& column = "RS-Agent");
nlohmann::json to_json(const PlanningReport& report);

} // namespace rsagent::eval
