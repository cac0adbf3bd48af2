#include "rsagent/llm/wire.hpp"

#include "rsagent/error.hpp"

#include <json.hpp>

namespace rsagent::llm::wire {

using nlohmann::json;

namespace {

template <typename Fn>
auto guarded(const std::string& body, const char* what, Fn&& fn)
{
    try {
        return fn();
    } catch (const ProtocolError&) {
        throw;
    } catch (const std::exception& e) {
        throw ProtocolError(std::string(what) + ": " + e.what(), body);
    }
}

void require(bool cond, const std::string& body, const char* what)
{
    if (!cond) throw ProtocolError(what, body);
}

} // namespace

ChatRequest make_request(std::string model, std::span<const ChatMessage> messages,
                         const GenerationParams& params)
{
    ChatRequest req;
    req.model = std::move(model);
    req.params = params;
    req.messages.reserve(messages.size());
    for (const auto& m : messages) req.messages.push_back({m.role, m.content});
    return req;
}

std::string serialize_request(const ChatRequest& request)
{
    json msgs = json::array();
    for (const auto& m : request.messages)
        msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    json body{{"model", request.model},
              {"messages", std::move(msgs)},
              {"temperature", request.params.temperature},
              {"max_tokens", request.params.max_tokens}};
    if (request.params.seed) body["seed"] = *request.params.seed;
    return body.dump();
}

ChatRequest parse_request(const std::string& body)
{
    return guarded(body, "malformed chat request", [&] {
        auto j = json::parse(body);
        require(j.is_object(), body, "request is not an object");
        ChatRequest req;
        req.model = j.at("model").get<std::string>();
        const auto& msgs = j.at("messages");
        require(msgs.is_array(), body, "messages is not an array");
        for (const auto& m : msgs)
            req.messages.push_back({role_from_string(m.at("role").get<std::string>()),
                                    m.at("content").get<std::string>()});
        req.params.temperature = j.at("temperature").get<double>();
        req.params.max_tokens = j.at("max_tokens").get<int>();
        if (j.contains("seed") && !j["seed"].is_null()) req.params.seed = j["seed"].get<std::int64_t>();
        return req;
    });
}

std::string serialize_response(const ChatResponse& response)
{
    const auto& c = response.completion;
    json body{
        {"id", response.id},
        {"object", "chat.completion"},
        {"model", response.model},
        {"choices",
         json::array({{{"index", 0},
                       {"message", {{"role", "assistant"}, {"content", c.content}}},
                       {"finish_reason", to_string(c.finish_reason)}}})},
        {"usage",
         {{"prompt_tokens", c.usage.prompt_tokens},
          {"completion_tokens", c.usage.completion_tokens},
          {"total_tokens", c.usage.prompt_tokens + c.usage.completion_tokens}}}};
    return body.dump();
}

ChatResponse parse_response(const std::string& body)
{
    return guarded(body, "malformed chat response", [&] {
        auto j = json::parse(body);
        require(j.is_object(), body, "response is not an object");
        const auto& choices = j.at("choices");
        require(choices.is_array() && !choices.empty(), body, "response has no choices");
        const auto& choice = choices.at(0);
        const auto& message = choice.at("message");

        ChatResponse resp;
        resp.id = j.value("id", "");
        resp.model = j.value("model", "");
        const auto& content = message.at("content");
        resp.completion.content = content.is_null() ? std::string{} : content.get<std::string>();
        const auto& reason = choice.value("finish_reason", json("stop"));
        resp.completion.finish_reason =
            reason.is_null() ? FinishReason::Stop : finish_reason_from_string(reason.get<std::string>());
        if (j.contains("usage") && j["usage"].is_object()) {
            resp.completion.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
            resp.completion.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
        }
        return resp;
    });
}

std::string serialize_embedding_request(const std::string& model, const std::string& input)
{
    return json{{"model", model}, {"input", input}}.dump();
}

std::vector<float> parse_embedding_response(const std::string& body)
{
    return guarded(body, "malformed embedding response", [&] {
        auto j = json::parse(body);
        const auto& data = j.at("data");
        require(data.is_array() && !data.empty(), body, "embedding response has no data");
        auto values = data.at(0).at("embedding").get<std::vector<float>>();
        require(!values.empty(), body, "embedding is empty");
        return values;
    });
}

} // namespace rsagent::llm::wire
