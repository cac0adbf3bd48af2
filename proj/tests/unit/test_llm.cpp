#include "support.hpp"

#include "rsagent/error.hpp"
#include "rsagent/llm/backend.hpp"
#include "rsagent/llm/digest.hpp"
#include "rsagent/llm/openai_backend.hpp"
#include "rsagent/llm/scripted_backend.hpp"
#include "rsagent/llm/wire.hpp"
#include "rsagent/text.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

using namespace rsagent;
using namespace rsagent::llm;

TEST(Text, TokenizeAndNormalize)
{
    EXPECT_EQ(text::tokenize("  Cloud-Removal, 2x!"), (std::vector<std::string>{"cloud", "removal", "2x"}));
    EXPECT_EQ(text::normalize("  Cloud-Removal "), "cloud removal");
    EXPECT_TRUE(text::tokenize("—→ !").empty());
    EXPECT_EQ(text::trim("\t a b \n"), "a b");
    EXPECT_TRUE(text::iequals("SAR", "sar"));
    EXPECT_EQ(text::replace_all("{a}{a}", "{a}", "x"), "xx");
}

TEST(Text, HashesMatchKnownVectors)
{
    // FNV-1a 64 reference values.
    EXPECT_EQ(text::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(text::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(text::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ChatValidation, RejectsBadRequestsBeforeTheBackend)
{
    ScriptedBackend backend({{SubstringMatch{{"hi"}}, "hello"}});
    GenerationParams params;
    std::vector<ChatMessage> empty;
    EXPECT_THROW(complete_chat(empty, params, backend), InputError);

    std::vector<ChatMessage> no_system{ChatMessage::user("hi")};
    EXPECT_THROW(complete_chat(no_system, params, backend), InputError);

    std::vector<ChatMessage> ok{ChatMessage::system("s"), ChatMessage::user("hi")};
    GenerationParams hot;
    hot.temperature = 3.0;
    EXPECT_THROW(complete_chat(ok, hot, backend), InputError);
    GenerationParams zero_tokens;
    zero_tokens.max_tokens = 0;
    EXPECT_THROW(complete_chat(ok, zero_tokens, backend), InputError);

    std::vector<ChatMessage> stray_call{ChatMessage::system("s"), ChatMessage::user("hi")};
    stray_call[1].tool_call = ToolCall{"caption", ""};
    EXPECT_THROW(complete_chat(stray_call, params, backend), InputError);

    EXPECT_EQ(complete_chat(ok, params, backend).content, "hello");
}

TEST(Digest, CanonicalFormIsStable)
{
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q")};
    EXPECT_EQ(canonicalize(m), R"([{"content":"s","role":"system"},{"content":"q","role":"user"}])");
    EXPECT_EQ(prompt_digest(m), text::sha256_hex(canonicalize(m)));
    auto other = m;
    other[1].content = "q ";
    EXPECT_NE(prompt_digest(m), prompt_digest(other));
    EXPECT_EQ(transcript_text(m), "[system]\ns\n[user]\nq\n");
}

TEST(ScriptedBackend, DigestAndSubstringRules)
{
    std::vector<ChatMessage> m{ChatMessage::system("sys"), ChatMessage::user("Remove the clouds")};
    ScriptedBackend backend;
    backend.register_script({{DigestMatch{prompt_digest(m)}, "TOOL: cloud_removal"}});
    backend.register_script({{SubstringMatch{{"clouds", "sys"}}, "second"}});
    GenerationParams p;
    auto reply = backend.complete(m, p);
    EXPECT_EQ(reply.content, "TOOL: cloud_removal");
    EXPECT_EQ(reply.finish_reason, FinishReason::Stop);

    std::vector<ChatMessage> m2{ChatMessage::system("sys"), ChatMessage::user("clouds again")};
    EXPECT_EQ(backend.complete(m2, p).content, "second");

    std::vector<ChatMessage> miss{ChatMessage::system("x"), ChatMessage::user("y")};
    try {
        backend.complete(miss, p);
        FAIL() << "expected ScriptMissError";
    } catch (const ScriptMissError& e) {
        EXPECT_EQ(e.digest(), prompt_digest(miss));
    }
}

TEST(ScriptedBackend, RejectsDuplicateAndEmptyScripts)
{
    ScriptedBackend backend;
    EXPECT_THROW(backend.register_script({}), InputError);
    backend.register_script({{SubstringMatch{{"a"}}, "1"}});
    EXPECT_THROW(backend.register_script({{SubstringMatch{{"a"}}, "2"}}), ConfigError);
    EXPECT_EQ(backend.rule_count(), 1u);
}

TEST(ScriptedBackend, ExpandsLastToolOutput)
{
    ScriptedBackend backend({{SubstringMatch{{"count"}}, "ANSWER: {{last_tool_output}}"}});
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("count planes"),
                               ChatMessage::assistant("TOOL: x", ToolCall{"x", ""}),
                               ChatMessage::tool("first"), ChatMessage::tool("3 planes")};
    EXPECT_EQ(backend.complete(m, {}).content, "ANSWER: 3 planes");
}

TEST(ScriptedBackend, LoadsJsonLines)
{
    auto rules = ScriptedBackend::parse_rules("# comment\n\n{\"contains\": \"a\", \"reply\": \"x\"}\n"
                                              "{\"contains\": [\"b\", \"c\"], \"reply\": \"y\"}\n"
                                              "{\"digest\": \"abc\", \"reply\": \"z\"}\n");
    ASSERT_EQ(rules.size(), 3u);
    EXPECT_EQ(std::get<SubstringMatch>(rules[1].match).all_of, (std::vector<std::string>{"b", "c"}));
    EXPECT_EQ(std::get<DigestMatch>(rules[2].match).digest, "abc");
    EXPECT_THROW(ScriptedBackend::parse_rules("{\"reply\": \"no match\"}\n"), ConfigError);
}

TEST(ScriptedBackend, IsSafeUnderConcurrentCalls)
{
    ScriptedBackend backend({{SubstringMatch{{"q"}}, "r"}});
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&] {
            std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q")};
            for (int i = 0; i < 200; ++i)
                if (backend.complete(m, {}).content == "r") ++ok;
        });
    for (auto& t : threads) t.join();
    EXPECT_EQ(ok.load(), 1600);
}

TEST(Wire, RequestAndResponseRoundTrip)
{
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q"),
                               ChatMessage::assistant("TOOL: caption", ToolCall{"caption", ""}),
                               ChatMessage::tool("Observation from caption: a ship")};
    GenerationParams p;
    p.seed = 42;
    auto req = wire::make_request("gpt-4o-mini", m, p);
    EXPECT_EQ(wire::parse_request(wire::serialize_request(req)), req);
    auto body = nlohmann::json::parse(wire::serialize_request(req));
    EXPECT_EQ(body["seed"], 42);
    EXPECT_EQ(body["messages"].size(), 4u);

    wire::ChatResponse resp{"id1", "gpt-4o-mini", {"hello", FinishReason::Length, {12, 3}}};
    EXPECT_EQ(wire::parse_response(wire::serialize_response(resp)), resp);
}

TEST(Wire, MalformedResponsesRaiseProtocolError)
{
    for (const std::string body : {"not json", "{}", R"({"choices": []})",
                                   R"({"choices": [{"message": {"role": "assistant"}}]})"}) {
        try {
            wire::parse_response(body);
            FAIL() << body;
        } catch (const ProtocolError& e) {
            EXPECT_EQ(e.raw_body(), body);
        }
    }
}

namespace {

EndpointProfile profile_for(const fixtures::FakeOpenAiServer& server)
{
    EndpointProfile p;
    p.base_url = server.base_url();
    p.model = "test-model";
    p.api_key_env = "RSAGENT_TEST_FAKE_KEY";
    p.max_retries = 2;
    p.timeout = std::chrono::milliseconds(5000);
    return p;
}

} // namespace

TEST(OpenAiBackend, SendsWireRequestAndParsesReply)
{
    auto scripted = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{{SubstringMatch{{"say OK"}}, "OK"}});
    fixtures::FakeOpenAiServer server(scripted);
    ::setenv("RSAGENT_TEST_FAKE_KEY", "sk-test", 1);
    OpenAiBackend backend(profile_for(server));
    std::vector<ChatMessage> m{ChatMessage::system("You are terse."), ChatMessage::user("say OK")};
    auto reply = complete_chat(m, {}, backend);
    EXPECT_EQ(reply.content, "OK");
    EXPECT_EQ(reply.finish_reason, FinishReason::Stop);
    EXPECT_EQ(server.last_authorization(), "Bearer sk-test");
    auto sent = nlohmann::json::parse(server.last_request());
    EXPECT_EQ(sent["model"], "test-model");
    EXPECT_EQ(sent["temperature"], 0.0);
}

TEST(OpenAiBackend, ToolMessagesTravelAsUserMessages)
{
    auto scripted = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{{SubstringMatch{{"Observation"}}, "ANSWER: done"}});
    fixtures::FakeOpenAiServer server(scripted);
    OpenAiBackend backend(profile_for(server));
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q"),
                               ChatMessage::assistant("TOOL: scene", ToolCall{"scene", ""}),
                               ChatMessage::tool("Observation from scene: airport")};
    EXPECT_EQ(backend.complete(m, {}).content, "ANSWER: done");
    auto sent = nlohmann::json::parse(server.last_request());
    EXPECT_EQ(sent["messages"][3]["role"], "user");
}

TEST(OpenAiBackend, RetriesServerErrorsThenSucceeds)
{
    auto scripted = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{{SubstringMatch{{"q"}}, "fine"}});
    fixtures::FakeOpenAiServer server(scripted);
    OpenAiBackend backend(profile_for(server));
    server.fail_next(2, 503);
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q")};
    EXPECT_EQ(backend.complete(m, {}).content, "fine");
    EXPECT_EQ(server.requests(), 3);
}

TEST(OpenAiBackend, ExhaustedRetriesRaiseNetworkError)
{
    auto scripted = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{{SubstringMatch{{"q"}}, "fine"}});
    fixtures::FakeOpenAiServer server(scripted);
    OpenAiBackend backend(profile_for(server));
    server.fail_next(10, 429);
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q")};
    try {
        backend.complete(m, {});
        FAIL();
    } catch (const NetworkError& e) {
        EXPECT_EQ(e.attempts(), 3);
    }
}

TEST(OpenAiBackend, ClientErrorsAndBadBodiesAreProtocolErrors)
{
    auto scripted = std::make_shared<ScriptedBackend>(std::vector<ScriptRule>{{SubstringMatch{{"q"}}, "fine"}});
    fixtures::FakeOpenAiServer server(scripted);
    OpenAiBackend backend(profile_for(server));
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q")};
    server.fail_next(1, 401);
    EXPECT_THROW(backend.complete(m, {}), ProtocolError);
    server.reply_raw_once("{\"unexpected\": true}");
    EXPECT_THROW(backend.complete(m, {}), ProtocolError);
    EXPECT_EQ(backend.complete(m, {}).content, "fine");
}

TEST(OpenAiBackend, UnreachableEndpointIsNetworkError)
{
    EndpointProfile p;
    p.base_url = "http://127.0.0.1:1";
    p.model = "m";
    p.max_retries = 0;
    p.timeout = std::chrono::milliseconds(500);
    OpenAiBackend backend(p);
    std::vector<ChatMessage> m{ChatMessage::system("s"), ChatMessage::user("q")};
    EXPECT_THROW(backend.complete(m, {}), NetworkError);
}

// Opt-in check against a real endpoint: RSAGENT_LIVE_BASE_URL, RSAGENT_LIVE_MODEL
// and the key in OPENAI_API_KEY.
TEST(OpenAiBackend, LiveEndpointSmoke)
{
    const char* url = std::getenv("RSAGENT_LIVE_BASE_URL");
    const char* model = std::getenv("RSAGENT_LIVE_MODEL");
    if (!url || !model) GTEST_SKIP() << "RSAGENT_LIVE_BASE_URL / RSAGENT_LIVE_MODEL not set";
    EndpointProfile p;
    p.base_url = url;
    p.model = model;
    p.api_key_env = "OPENAI_API_KEY";
    OpenAiBackend backend(p);
    std::vector<ChatMessage> m{ChatMessage::system("Reply with the single word OK."), ChatMessage::user("say OK")};
    auto reply = complete_chat(m, {}, backend);
    EXPECT_FALSE(reply.content.empty());
    EXPECT_EQ(reply.finish_reason, FinishReason::Stop);
}
