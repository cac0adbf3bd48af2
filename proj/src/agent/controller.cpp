#include "rsagent/agent/controller.hpp"

#include "rsagent/knowledge/keywords.hpp"
#include "rsagent/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rsagent::agent {

namespace {

constexpr std::string_view kFormatReminder =
    "Observation: the reply did not follow the required format. Reply with "
    "\"TOOL: <tool name> | INPUT: <tool input>\" or \"ANSWER: <final answer>\".";

std::string turn_line(const ConversationTurn& t)
{
    std::string line = (t.role == TurnRole::User ? "User: " : "Agent: ") + t.text;
    if (t.attached_image_ref) line += " [image: " + *t.attached_image_ref + "]";
    return line;
}

std::size_t token_overlap(const std::set<std::string>& a, const std::vector<std::string>& b)
{
    std::set<std::string> seen;
    for (const auto& t : b)
        if (a.count(t)) seen.insert(t);
    return seen.size();
}

} // namespace

std::optional<std::string> match_task_label(const std::string& reply, const std::vector<std::string>& supported)
{
    const auto trimmed = std::string(text::trim(reply));
    for (const auto& label : supported)
        if (label == trimmed) return label;

    std::vector<std::string> labels = supported;
    std::sort(labels.begin(), labels.end());
    const auto norm = text::normalize(reply);
    if (norm.empty()) return std::nullopt;
    for (const auto& label : labels)
        if (text::normalize(label) == norm) return label;

    const auto padded = " " + norm + " ";
    std::optional<std::string> contained;
    std::size_t contained_len = 0;
    for (const auto& label : labels) {
        auto nl = text::normalize(label);
        if (nl.empty() || padded.find(" " + nl + " ") == std::string::npos) continue;
        if (nl.size() > contained_len) {
            contained = label;
            contained_len = nl.size();
        }
    }
    if (contained) return contained;

    const auto reply_tokens = text::tokenize(reply);
    const std::set<std::string> reply_set(reply_tokens.begin(), reply_tokens.end());
    std::optional<std::string> best;
    std::size_t best_overlap = 0;
    for (const auto& label : labels) {
        auto overlap = token_overlap(reply_set, text::tokenize(label));
        if (overlap > best_overlap) {
            best = label;
            best_overlap = overlap;
        }
    }
    return best;
}

Controller::Controller(std::shared_ptr<llm::ChatBackend> llm, std::shared_ptr<const solution::SolutionStore> solutions,
                       std::shared_ptr<const tools::ToolRegistry> tools, PromptSet prompts, ControllerConfig config)
    : llm_(std::move(llm)), solutions_(std::move(solutions)), tools_(std::move(tools)), prompts_(std::move(prompts)),
      config_(config)
{
    if (!llm_ || !solutions_ || !tools_) throw ConfigError("controller needs a chat backend, solution store and toolkit");
    if (config_.max_steps < 1) throw ConfigError("max_steps must be at least 1");
    llm::validate(config_.params);
}

std::string Controller::ask(const PromptTemplate& tmpl, const PromptValues& values) const
{
    std::vector<llm::ChatMessage> messages{llm::ChatMessage::system(render(tmpl.system, values)),
                                           llm::ChatMessage::user(render(tmpl.user, values))};
    return llm::complete_chat(messages, config_.params, *llm_).content;
}

TaskInferred Controller::infer_task_type(const std::string& query, const std::vector<std::string>& supported) const
{
    if (supported.empty()) throw InputError("task inference needs at least one supported task");
    const auto reply = ask(prompts_.stage1, {{"supported tasks", text::join(supported, ", ")}, {"Q", query}});
    if (text::trim(reply).empty()) throw PlanningError("task inference returned an empty reply", {});
    auto label = match_task_label(reply, supported);
    if (!label) throw PlanningError("task inference reply matches no supported task: " + reply, {});
    return {*label, reply, *label != text::trim(reply)};
}

std::string Controller::render_tools(std::span<const tools::ToolDescriptor> tools)
{
    std::vector<std::string> lines;
    for (const auto& d : tools)
        lines.push_back("- " + d.name + " (input: " + std::string(tools::to_string(d.input_kind)) + "): " + d.function +
                        ". Example: \"" + d.example_input + "\"");
    return text::join(lines, "\n");
}

std::string Controller::render_history(std::span<const ConversationTurn> history) const
{
    if (history.empty()) return "(none)";
    std::vector<std::string> lines;
    std::size_t start = 0;
    if (history.size() > config_.history_turns) {
        start = history.size() - config_.history_turns;
        if (config_.summarize_history) {
            std::vector<std::string> older;
            for (std::size_t i = 0; i < start; ++i) older.push_back(turn_line(history[i]));
            auto summary = text::trim(ask(prompts_.summarize, {{"conversation", text::join(older, "\n")}}));
            lines.push_back("Summary of " + std::to_string(start) + " earlier turns: " + std::string(summary));
        } else {
            lines.push_back("(" + std::to_string(start) + " earlier turns omitted)");
        }
    }
    for (std::size_t i = start; i < history.size(); ++i) lines.push_back(turn_line(history[i]));
    return "\n" + text::join(lines, "\n");
}

std::vector<llm::ChatMessage> Controller::build_stage2_prompt(const std::string& query,
                                                              const std::optional<solution::SolutionGuidance>& guidance,
                                                              std::span<const ConversationTurn> history,
                                                              std::span<const tools::ToolDescriptor> tools,
                                                              const std::optional<std::string>& image_ref,
                                                              std::span<const llm::ChatMessage> scratchpad) const
{
    PromptValues values{
        {"tools", render_tools(tools)},
        {"Q", query},
        {"input image", image_ref},
        {"solution guidance", guidance ? std::optional(guidance->document.guidance) : std::nullopt},
        {"conversation_history", render_history(history)},
    };
    std::vector<llm::ChatMessage> messages{llm::ChatMessage::system(render(prompts_.stage2.system, values)),
                                           llm::ChatMessage::user(render(prompts_.stage2.user, values))};
    messages.insert(messages.end(), scratchpad.begin(), scratchpad.end());
    return messages;
}

std::vector<knowledge::WeightedKeyword> Controller::generate_keywords(const std::string& query) const
{
    return knowledge::parse_weighted_keywords(ask(prompts_.keywords, {{"Q", query}}));
}

AgentResponse Controller::handle_query(SessionState& session, const std::string& query,
                                       const std::optional<std::string>& image_ref,
                                       const EventObserver& observer) const
{
    if (text::trim(query).empty()) throw InputError("query is empty");

    AgentTrace trace;
    auto emit = [&](TraceEvent event) {
        trace.events.push_back(std::move(event));
        if (observer) observer(trace.events.back());
    };

    // Stage 1: task inference and solution retrieval.
    std::string retrieval_query = query;
    if (session.flags.task_inference_enabled) {
        auto inferred = infer_task_type(query, solutions_->list_task_types());
        retrieval_query = inferred.task_type;
        emit(std::move(inferred));
    }
    std::optional<solution::SolutionGuidance> guidance;
    if (session.flags.solution_retrieval_enabled) {
        guidance = solutions_->retrieve_solution(retrieval_query);
        emit(SolutionRetrieved{retrieval_query, guidance->document.task_type, guidance->document.guidance,
                               guidance->document.tools, guidance->score});
    }

    // Stage 2: plan/act loop.
    const auto tools = tools_->describe_tools();
    std::optional<std::string> current_image = image_ref ? image_ref : session.current_image_ref;
    std::optional<std::string> produced;
    std::vector<llm::ChatMessage> scratchpad;
    std::map<std::string, int> failures;

    for (int step = 0; step < config_.max_steps; ++step) {
        auto messages = build_stage2_prompt(query, guidance, session.history, tools, current_image, scratchpad);
        const auto reply = llm::complete_chat(messages, config_.params, *llm_).content;
        auto decision = parse_decision(reply);
        if (!decision) {
            scratchpad.push_back(llm::ChatMessage::assistant(text::trim(reply).empty() ? "(empty reply)" : reply));
            scratchpad.push_back(llm::ChatMessage::tool(std::string(kFormatReminder)));
            continue;
        }

        if (decision->kind == PlannerDecision::Kind::FinalAnswer) {
            emit(FinalAnswer{decision->answer, produced});
            session.current_image_ref = current_image;
            session.traces.push_back(trace);
            session.history.push_back({TurnRole::User, query, image_ref, std::nullopt});
            session.history.push_back({TurnRole::Agent, decision->answer, std::nullopt, session.traces.size() - 1});
            return {decision->answer, produced, std::move(trace)};
        }

        scratchpad.push_back(llm::ChatMessage::assistant(format_decision(*decision),
                                                         llm::ToolCall{decision->tool_name, decision->tool_input}));
        ToolInvoked call{decision->tool_name, {decision->tool_input, std::nullopt}, std::nullopt, std::nullopt};
        const auto canonical = tools_->resolve(decision->tool_name);
        const auto descriptor = canonical ? tools_->find(*canonical) : std::nullopt;
        const bool knowledge = canonical && *canonical == kKnowledgeSearchTool;

        std::vector<knowledge::WeightedKeyword> keywords;
        if (knowledge) {
            keywords = generate_keywords(query);
            if (keywords.empty()) keywords = knowledge::parse_weighted_keywords(decision->tool_input);
            if (!keywords.empty()) call.input.text_args = knowledge::format_weighted_keywords(keywords);
        } else if (descriptor && tools::needs_image(descriptor->input_kind)) {
            call.input.image_ref = current_image;
        }

        std::string observation;
        try {
            if (!canonical) throw ToolNotFoundError(decision->tool_name);
            if (knowledge && keywords.empty())
                throw ToolExecutionError(*canonical, "no keywords could be derived from the query");
            auto output = tools_->invoke(*canonical, call.input);
            call.output = output;
            emit(call);
            if (knowledge) emit(KnowledgeRetrieved{keywords, knowledge::guidance_from_json(output.payload)});
            if (output.produced_image_ref) current_image = produced = output.produced_image_ref;
            observation = "Observation from " + decision->tool_name + ": " + output.text_result;
        } catch (const ToolNotFoundError& e) {
            call.error = e.what();
            emit(call);
            observation = "Observation from " + decision->tool_name + ": error: " + e.what();
        } catch (const InputError& e) {
            call.error = e.what();
            emit(call);
            observation = "Observation from " + decision->tool_name + ": error: " + e.what();
        } catch (const ToolExecutionError& e) {
            call.error = e.what();
            emit(call);
            observation = "Observation from " + decision->tool_name + ": error: " + e.what();
        }
        if (call.error && ++failures[canonical.value_or(decision->tool_name)] >= 2)
            throw ToolExecutionError(decision->tool_name, "failed twice in one query: " + *call.error);
        scratchpad.push_back(llm::ChatMessage::tool(observation));
    }
    throw PlanningError("no final answer within " + std::to_string(config_.max_steps) + " steps", std::move(trace));
}

} // namespace rsagent::agent
