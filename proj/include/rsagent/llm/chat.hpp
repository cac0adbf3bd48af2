#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsagent::llm {

enum class Role { System, User, Assistant, Tool };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ToolCall {
    std::string tool_name;
    std::string arguments;

    bool operator==(const ToolCall&) const = default;
};

struct ChatMessage {
    Role role = Role::User;
    std::string content;
    std::optional<ToolCall> tool_call; // assistant messages only

    static ChatMessage system(std::string content) { return {Role::System, std::move(content), {}}; }
    static ChatMessage user(std::string content) { return {Role::User, std::move(content), {}}; }
    static ChatMessage assistant(std::string content, std::optional<ToolCall> call = {})
    {
        return {Role::Assistant, std::move(content), std::move(call)};
    }
    static ChatMessage tool(std::string content) { return {Role::Tool, std::move(content), {}}; }

    bool operator==(const ChatMessage&) const = default;
};

/// Throws InputError when the role/tool_call/content invariants do not hold.
void validate(const ChatMessage& message);

/// Sampling parameters. Temperature defaults to 0 so planning is reproducible.
struct GenerationParams {
    double temperature = 0.0;
    int max_tokens = 1024;
    std::optional<std::int64_t> seed;

    bool operator==(const GenerationParams&) const = default;
};

void validate(const GenerationParams& params);

enum class FinishReason { Stop, Length, ToolCall };

std::string_view to_string(FinishReason reason);
FinishReason finish_reason_from_string(std::string_view s);

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    bool operator==(const Usage&) const = default;
};

struct ChatCompletion {
    std::string content;
    FinishReason finish_reason = FinishReason::Stop;
    Usage usage;

    bool operator==(const ChatCompletion&) const = default;
};

} // namespace rsagent::llm
