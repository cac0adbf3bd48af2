#pragma once

#include "rsagent/llm/backend.hpp"

#include <chrono>
#include <string>

namespace rsagent::llm {

/// Connection settings for one named backend profile.
struct EndpointProfile {
    std::string name = "default";
    std::string base_url;     // e.g. "http://localhost:8000" (no trailing /v1)
    std::string model;
    std::string api_key_env;  // env var holding the bearer token; may be empty
    int max_retries = 2;      // extra attempts after a NetworkError
    std::chrono::milliseconds timeout{60000};
};

/// Chat completions over the OpenAI-compatible HTTP protocol.
///
/// Transport failures and 429/5xx replies are retried up to max_retries
/// times and then surface as NetworkError. Any other non-2xx status or an
/// unparsable body raises ProtocolError immediately.
class OpenAiBackend final : public ChatBackend {
public:
    explicit OpenAiBackend(EndpointProfile profile);

    ChatCompletion complete(std::span<const ChatMessage> messages,
                            const GenerationParams& params) override;

    std::string name() const override { return "openai:" + profile_.name; }

    const EndpointProfile& profile() const noexcept { return profile_; }

    /// POSTs `body` to `path` with retries; returns the 2xx response body.
    std::string post_json(const std::string& path, const std::string& body) const;

private:
    EndpointProfile profile_;
    std::string api_key_;
};

} // namespace rsagent::llm
