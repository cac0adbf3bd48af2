#pragma once

// JSON bodies for the OpenAI-compatible chat-completions endpoint.
//
// Request  (POST {base}/v1/chat/completions):
//   {"model": str, "messages": [{"role": str, "content": str}, ...],
//    "temperature": number, "max_tokens": int, "seed": int (optional)}
// Response:
//   {"id": str, "object": "chat.completion", "model": str,
//    "choices": [{"index": 0, "message": {"role": "assistant", "content": str},
//                 "finish_reason": "stop" | "length" | "tool_calls"}],
//    "usage": {"prompt_tokens": int, "completion_tokens": int, "total_tokens": int}}
//
// Tool calls travel inside message content (the planner's text envelope),
// so the wire messages carry role and content only.

#include "rsagent/llm/chat.hpp"

#include <span>
#include <string>
#include <vector>

namespace rsagent::llm::wire {

struct WireMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const WireMessage&) const = default;
};

struct ChatRequest {
    std::string model;
    std::vector<WireMessage> messages;
    GenerationParams params;

    bool operator==(const ChatRequest&) const = default;
};

struct ChatResponse {
    std::string id;
    std::string model;
    ChatCompletion completion;

    bool operator==(const ChatResponse&) const = default;
};

ChatRequest make_request(std::string model, std::span<const ChatMessage> messages,
                         const GenerationParams& params);

std::string serialize_request(const ChatRequest& request);
/// Throws ProtocolError carrying `body` when it does not match the schema.
ChatRequest parse_request(const std::string& body);

std::string serialize_response(const ChatResponse& response);
/// Throws ProtocolError carrying `body` when it does not match the schema.
ChatResponse parse_response(const std::string& body);

// Embeddings endpoint (POST {base}/v1/embeddings):
//   request  {"model": str, "input": str}
//   response {"data": [{"index": 0, "embedding": [number, ...]}], "model": str}
std::string serialize_embedding_request(const std::string& model, const std::string& input);
std::vector<float> parse_embedding_response(const std::string& body);

} // namespace rsagent::llm::wire
