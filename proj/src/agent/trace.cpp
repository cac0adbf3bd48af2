#include "rsagent/agent/trace.hpp"

#include "rsagent/error.hpp"

namespace rsagent::agent {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json opt(const std::optional<std::string>& s)
{
    return s ? json(*s) : json(nullptr);
}

std::optional<std::string> opt_from(const json& j, const char* key)
{
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

tools::ToolInput input_from_json(const json& j)
{
    return {j.at("text_args").get<std::string>(), opt_from(j, "image_ref")};
}

tools::ToolOutput output_from_json(const json& j)
{
    return {j.at("text_result").get<std::string>(), opt_from(j, "produced_image_ref"),
            j.contains("payload") ? j["payload"] : json(nullptr)};
}

} // namespace

std::string_view event_kind(const TraceEvent& event)
{
    return std::visit(overloaded{
                          [](const TaskInferred&) { return std::string_view("task_inferred"); },
                          [](const SolutionRetrieved&) { return std::string_view("solution_retrieved"); },
                          [](const ToolInvoked&) { return std::string_view("tool_invoked"); },
                          [](const KnowledgeRetrieved&) { return std::string_view("knowledge_retrieved"); },
                          [](const FinalAnswer&) { return std::string_view("final_answer"); },
                      },
                      event);
}

json to_json(const TraceEvent& event)
{
    json j = std::visit(
        overloaded{
            [](const TaskInferred& e) -> json {
                return {{"task_type", e.task_type}, {"raw_reply", e.raw_reply}, {"normalized", e.normalized}};
            },
            [](const SolutionRetrieved& e) -> json {
                return {{"query", e.query},
                        {"task_type", e.task_type},
                        {"guidance", e.guidance},
                        {"tools", e.tools},
                        {"score", e.score}};
            },
            [](const ToolInvoked& e) -> json {
                return {{"name", e.name},
                        {"input", tools::to_json(e.input)},
                        {"output", e.output ? tools::to_json(*e.output) : json(nullptr)},
                        {"error", opt(e.error)}};
            },
            [](const KnowledgeRetrieved& e) -> json {
                json kws = json::array();
                for (const auto& k : e.keywords) kws.push_back(knowledge::to_json(k));
                return {{"keywords", kws}, {"guidance", knowledge::to_json(e.guidance)}};
            },
            [](const FinalAnswer& e) -> json { return {{"text", e.text}, {"image_ref", opt(e.image_ref)}}; },
        },
        event);
    j["kind"] = event_kind(event);
    return j;
}

TraceEvent event_from_json(const json& j)
{
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "task_inferred")
        return TaskInferred{j.at("task_type"), j.at("raw_reply"), j.at("normalized")};
    if (kind == "solution_retrieved")
        return SolutionRetrieved{j.at("query"), j.at("task_type"), j.at("guidance"),
                                 j.at("tools").get<std::vector<std::string>>(), j.at("score")};
    if (kind == "tool_invoked") {
        ToolInvoked e;
        e.name = j.at("name");
        e.input = input_from_json(j.at("input"));
        if (!j.at("output").is_null()) e.output = output_from_json(j["output"]);
        e.error = opt_from(j, "error");
        return e;
    }
    if (kind == "knowledge_retrieved") {
        KnowledgeRetrieved e;
        for (const auto& k : j.at("keywords")) e.keywords.push_back({k.at("keyword"), k.at("weight")});
        e.guidance = knowledge::guidance_from_json(j.at("guidance"));
        return e;
    }
    if (kind == "final_answer") return FinalAnswer{j.at("text"), opt_from(j, "image_ref")};
    throw InputError("unknown trace event kind: " + kind);
}

json to_json(const AgentTrace& trace)
{
    json events = json::array();
    for (const auto& e : trace.events) events.push_back(to_json(e));
    return {{"events", events}};
}

AgentTrace trace_from_json(const json& j)
{
    AgentTrace t;
    for (const auto& e : j.at("events")) t.events.push_back(event_from_json(e));
    return t;
}

std::optional<std::string> first_tool(const AgentTrace& trace)
{
    for (const auto& e : trace.events)
        if (const auto* call = std::get_if<ToolInvoked>(&e)) return call->name;
    return std::nullopt;
}

std::optional<std::string> check_trace(const AgentTrace& trace)
{
    if (trace.events.empty()) return "trace is empty";
    std::size_t inferred = 0;
    std::size_t answers = 0;
    bool tool_seen = false;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        if (std::holds_alternative<TaskInferred>(e)) {
            if (++inferred > 1) return "more than one task_inferred";
            if (i != 0) return "task_inferred is not the first event";
        } else if (std::holds_alternative<SolutionRetrieved>(e)) {
            if (tool_seen) return "solution_retrieved after a tool call";
        } else if (std::holds_alternative<ToolInvoked>(e)) {
            tool_seen = true;
        } else if (std::holds_alternative<FinalAnswer>(e)) {
            ++answers;
        }
    }
    if (answers != 1) return "expected exactly one final_answer, found " + std::to_string(answers);
    if (!std::holds_alternative<FinalAnswer>(trace.events.back())) return "final_answer is not the last event";
    return std::nullopt;
}

} // namespace rsagent::agent
