#include "rsagent/llm/backend.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

namespace rsagent::llm {

std::string_view to_string(Role role)
{
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "user";
}

Role role_from_string(std::string_view s)
{
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    if (s == "tool") return Role::Tool;
    throw InputError("unknown role: " + std::string(s));
}

std::string_view to_string(FinishReason reason)
{
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::ToolCall: return "tool_calls";
    }
    return "stop";
}

FinishReason finish_reason_from_string(std::string_view s)
{
    if (s == "stop") return FinishReason::Stop;
    if (s == "length") return FinishReason::Length;
    if (s == "tool_calls" || s == "tool_call" || s == "function_call") return FinishReason::ToolCall;
    throw InputError("unknown finish_reason: " + std::string(s));
}

void validate(const ChatMessage& message)
{
    if (message.tool_call && message.role != Role::Assistant)
        throw InputError("tool_call is only allowed on assistant messages");
    if (message.role == Role::Tool && text::trim(message.content).empty())
        throw InputError("tool message content must be non-empty");
}

void validate(const GenerationParams& params)
{
    if (!(params.temperature >= 0.0 && params.temperature <= 2.0))
        throw InputError("temperature must lie in [0, 2]");
    if (params.max_tokens <= 0)
        throw InputError("max_tokens must be positive");
}

ChatCompletion complete_chat(std::span<const ChatMessage> messages,
                             const GenerationParams& params,
                             ChatBackend& backend)
{
    if (messages.empty())
        throw InputError("complete_chat: message list is empty");
    if (messages.front().role != Role::System)
        throw InputError("complete_chat: first message must have role=system");
    for (const auto& m : messages) validate(m);
    validate(params);
    return backend.complete(messages, params);
}

} // namespace rsagent::llm
