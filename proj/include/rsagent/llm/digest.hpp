#pragma once

#include "rsagent/llm/chat.hpp"

#include <span>
#include <string>

namespace rsagent::llm {

/// Compact JSON array of {role, content[, tool_call]} objects with sorted keys.
std::string canonicalize(std::span<const ChatMessage> messages);

/// Lowercase hex SHA-256 of canonicalize(messages).
std::string prompt_digest(std::span<const ChatMessage> messages);

/// "[role]\ncontent\n" for every message; what substring rules match against.
std::string transcript_text(std::span<const ChatMessage> messages);

} // namespace rsagent::llm
