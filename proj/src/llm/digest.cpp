#include "rsagent/llm/digest.hpp"

#include "rsagent/text.hpp"

#include <json.hpp>

namespace rsagent::llm {

std::string canonicalize(std::span<const ChatMessage> messages)
{
    auto arr = nlohmann::json::array();
    for (const auto& m : messages) {
        nlohmann::json obj{{"role", to_string(m.role)}, {"content", m.content}};
        if (m.tool_call)
            obj["tool_call"] = {{"tool_name", m.tool_call->tool_name},
                                {"arguments", m.tool_call->arguments}};
        arr.push_back(std::move(obj));
    }
    // nlohmann objects are std::map-backed, so keys come out sorted.
    return arr.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string prompt_digest(std::span<const ChatMessage> messages)
{
    return text::sha256_hex(canonicalize(messages));
}

std::string transcript_text(std::span<const ChatMessage> messages)
{
    std::string out;
    for (const auto& m : messages) {
        out += '[';
        out += to_string(m.role);
        out += "]\n";
        out += m.content;
        out += '\n';
    }
    return out;
}

} // namespace rsagent::llm
