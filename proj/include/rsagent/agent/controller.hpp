#pragma once

#include "rsagent/agent/decision.hpp"
#include "rsagent/agent/prompts.hpp"
#include "rsagent/agent/session.hpp"
#include "rsagent/agent/trace.hpp"
#include "rsagent/error.hpp"
#include "rsagent/llm/backend.hpp"
#include "rsagent/solution/solution_store.hpp"
#include "rsagent/tools/registry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsagent::agent {

/// The plan/act loop gave up. Carries everything recorded so far.
class PlanningError : public Error {
public:
    PlanningError(const std::string& what, AgentTrace trace) : Error(what), trace_(std::move(trace)) {}

    const AgentTrace& trace() const noexcept { return trace_; }

private:
    AgentTrace trace_;
};

struct ControllerConfig {
    int max_steps = 6;
    std::size_t history_turns = 20;
    bool summarize_history = false; // one extra model call when history overflows
    llm::GenerationParams params;
};

struct AgentResponse {
    std::string answer;
    std::optional<std::string> processed_image_ref; // last image a tool produced
    AgentTrace trace;
};

/// Called synchronously for every trace event as it is recorded.
using EventObserver = std::function<void(const TraceEvent&)>;

inline constexpr const char* kKnowledgeSearchTool = "knowledge_search";

class Controller {
public:
    Controller(std::shared_ptr<llm::ChatBackend> llm, std::shared_ptr<const solution::SolutionStore> solutions,
               std::shared_ptr<const tools::ToolRegistry> tools, PromptSet prompts = PromptSet::builtin(),
               ControllerConfig config = {});

    /// Stage 1. An exact reply is used as-is; anything else is mapped to the
    /// closest supported label (match_task_label) and flagged as normalized.
    /// Throws InputError when `supported` is empty and PlanningError when
    /// the reply is empty or shares no token with any label.
    TaskInferred infer_task_type(const std::string& query, const std::vector<std::string>& supported) const;

    /// Stage 2 prompt: system + user message, then the step scratchpad.
    std::vector<llm::ChatMessage> build_stage2_prompt(const std::string& query,
                                                      const std::optional<solution::SolutionGuidance>& guidance,
                                                      std::span<const ConversationTurn> history,
                                                      std::span<const tools::ToolDescriptor> tools,
                                                      const std::optional<std::string>& image_ref = std::nullopt,
                                                      std::span<const llm::ChatMessage> scratchpad = {}) const;

    /// Weighted keywords for knowledge_search, from the keyword prompt.
    std::vector<knowledge::WeightedKeyword> generate_keywords(const std::string& query) const;

    /// Runs both stages and the plan/act loop for one query. On success the
    /// session gains a user and an agent turn; on any error it is left untouched.
    AgentResponse handle_query(SessionState& session, const std::string& query,
                               const std::optional<std::string>& image_ref = std::nullopt,
                               const EventObserver& observer = {}) const;

    const ControllerConfig& config() const noexcept { return config_; }
    const PromptSet& prompts() const noexcept { return prompts_; }

    static std::string render_tools(std::span<const tools::ToolDescriptor> tools);
    std::string render_history(std::span<const ConversationTurn> history) const;

private:
    std::string ask(const PromptTemplate& tmpl, const PromptValues& values) const;

    std::shared_ptr<llm::ChatBackend> llm_;
    std::shared_ptr<const solution::SolutionStore> solutions_;
    std::shared_ptr<const tools::ToolRegistry> tools_;
    PromptSet prompts_;
    ControllerConfig config_;
};

/// Maps a free-form reply onto one of `supported`: exact match, then equal
/// normalized text, then the longest label contained in the reply, then
/// the largest token overlap. Ties go to the alphabetically first label.
std::optional<std::string> match_task_label(const std::string& reply, const std::vector<std::string>& supported);

} // namespace rsagent::agent
