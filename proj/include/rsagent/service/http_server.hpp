#pragma once

// HTTP API. Request and response bodies are JSON unless noted; errors are
// {"error": str} with a 4xx/5xx status. See docs/http-api.md.

#include "rsagent/agent/trace.hpp"
#include "rsagent/service/app.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace rsagent::service {

/// One element of a message response. seq increases strictly per session.
struct ChatEventFrame {
    std::uint64_t seq = 0;
    std::string kind; // user_message, error, or a trace event kind
    nlohmann::json payload;
};

nlohmann::json to_json(const ChatEventFrame& frame);

/// Frame payload for a trace event: the event's JSON without "kind"; a
/// final answer with an image also gets "image_url".
nlohmann::json frame_payload(const agent::TraceEvent& event);

class HttpService {
public:
    /// An empty `api_token` disables authentication.
    HttpService(App& app, std::string api_token = {});
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Blocks until stop(). Returns false when the address cannot be bound.
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it (or -1); call listen_after_bind() next.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    bool is_running() const;

private:
    void install_routes();

    App& app_;
    std::string token_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace rsagent::service
