#pragma once

#include "rsagent/agent/trace.hpp"
#include "rsagent/service/app.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace rsagent::service {

/// Human-readable trace, one numbered line per event.
std::string render_trace_text(const agent::AgentTrace& trace);

/// Line-oriented chat against one session. Commands:
///   :image <path>  attach an image to the next query
///   :trace         print the last trace
///   :help          list commands
///   :quit          leave
class Repl {
public:
    Repl(App& app, std::istream& in, std::ostream& out, agent::SessionFlags flags = {});

    /// Returns the process exit code.
    int run();

private:
    void handle_query(const std::string& line);
    void print_help();

    App& app_;
    std::istream& in_;
    std::ostream& out_;
    std::string session_id_;
    std::optional<std::string> pending_image_;
    std::optional<agent::AgentTrace> last_trace_;
};

} // namespace rsagent::service
