#pragma once

#include "rsagent/llm/chat.hpp"

#include <span>
#include <string>

namespace rsagent::llm {

/// A chat-completion provider. Implementations must be safe to call from
/// several threads at once.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    virtual ChatCompletion complete(std::span<const ChatMessage> messages,
                                    const GenerationParams& params) = 0;

    virtual std::string name() const = 0;
};

/// Validates the request, then forwards it to `backend`.
///
/// The message list must be non-empty and open with a system message; each
/// message must satisfy its role invariants. Violations raise InputError
/// before the backend is contacted.
ChatCompletion complete_chat(std::span<const ChatMessage> messages,
                             const GenerationParams& params,
                             ChatBackend& backend);

} // namespace rsagent::llm
