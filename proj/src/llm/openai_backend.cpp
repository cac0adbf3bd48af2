#include "rsagent/llm/openai_backend.hpp"

#include "rsagent/error.hpp"
#include "rsagent/llm/wire.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace rsagent::llm {

namespace {

struct SplitUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

SplitUrl split_base_url(const std::string& base)
{
    auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + base);
    auto path_start = base.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = base;
    } else {
        out.scheme_host_port = base.substr(0, path_start);
        out.path_prefix = base.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    }
    return out;
}

} // namespace

OpenAiBackend::OpenAiBackend(EndpointProfile profile) : profile_(std::move(profile))
{
    if (profile_.base_url.empty()) throw ConfigError("backend profile '" + profile_.name + "' has no base_url");
    if (profile_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    split_base_url(profile_.base_url);
    if (!profile_.api_key_env.empty())
        if (const char* key = std::getenv(profile_.api_key_env.c_str())) api_key_ = key;
}

std::string OpenAiBackend::post_json(const std::string& path, const std::string& body) const
{
    auto url = split_base_url(profile_.base_url);
    httplib::Client client(url.scheme_host_port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(profile_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(profile_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const int attempts = 1 + profile_.max_retries;
    std::string last_error;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto res = client.Post(url.path_prefix + path, headers, body, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
        } else if (res->status < 200 || res->status >= 300) {
            throw ProtocolError("HTTP " + std::to_string(res->status) + " from " + profile_.base_url + path,
                                res->body);
        } else {
            return res->body;
        }
        if (attempt < attempts) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    }
    throw NetworkError(profile_.base_url + path + ": " + last_error, attempts);
}

ChatCompletion OpenAiBackend::complete(std::span<const ChatMessage> messages,
                                       const GenerationParams& params)
{
    auto request = wire::make_request(profile_.model, messages, params);
    // Observations are plain text here; the "tool" role would need a native tool_call_id.
    for (auto& m : request.messages)
        if (m.role == Role::Tool) m.role = Role::User;
    auto body = wire::serialize_request(request);
    return wire::parse_response(post_json("/v1/chat/completions", body)).completion;
}

} // namespace rsagent::llm
