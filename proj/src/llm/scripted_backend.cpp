#include "rsagent/llm/scripted_backend.hpp"

#include "rsagent/error.hpp"
#include "rsagent/llm/digest.hpp"
#include "rsagent/text.hpp"

#include <json.hpp>

#include <algorithm>

namespace rsagent::llm {

namespace {

bool matches(const ScriptMatch& match, const std::string& digest, const std::string& transcript)
{
    if (const auto* d = std::get_if<DigestMatch>(&match)) return d->digest == digest;
    const auto& s = std::get<SubstringMatch>(match);
    return std::all_of(s.all_of.begin(), s.all_of.end(), [&](const std::string& needle) {
        return transcript.find(needle) != std::string::npos;
    });
}

std::string describe(const ScriptMatch& match)
{
    if (const auto* d = std::get_if<DigestMatch>(&match)) return "digest " + d->digest;
    return "substrings [" + text::join(std::get<SubstringMatch>(match).all_of, ", ") + "]";
}

std::int64_t count_words(std::string_view s)
{
    std::int64_t n = 0;
    bool in_word = false;
    for (char c : s) {
        bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

} // namespace

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules)
{
    register_script(std::move(rules));
}

void ScriptedBackend::register_script(std::vector<ScriptRule> rules)
{
    if (rules.empty()) throw InputError("register_script: rule list is empty");
    for (const auto& rule : rules) {
        if (const auto* s = std::get_if<SubstringMatch>(&rule.match); s && s->all_of.empty())
            throw ConfigError("substring rule needs at least one substring");
        auto clash = [&](const ScriptRule& r) { return r.match == rule.match; };
        if (std::any_of(rules_.begin(), rules_.end(), clash))
            throw ConfigError("duplicate script match key: " + describe(rule.match));
        rules_.push_back(rule);
    }
}

ChatCompletion ScriptedBackend::complete(std::span<const ChatMessage> messages,
                                         const GenerationParams&)
{
    const auto digest = prompt_digest(messages);
    const auto transcript = transcript_text(messages);
    for (const auto& rule : rules_) {
        if (!matches(rule.match, digest, transcript)) continue;

        std::string reply = rule.reply;
        if (reply.find("{{last_tool_output}}") != std::string::npos) {
            std::string last;
            for (auto it = messages.rbegin(); it != messages.rend(); ++it)
                if (it->role == Role::Tool) {
                    last = it->content;
                    break;
                }
            reply = text::replace_all(std::move(reply), "{{last_tool_output}}", last);
        }

        ChatCompletion out;
        out.content = std::move(reply);
        out.finish_reason = FinishReason::Stop;
        for (const auto& m : messages) out.usage.prompt_tokens += count_words(m.content);
        out.usage.completion_tokens = count_words(out.content);
        return out;
    }
    throw ScriptMissError(digest);
}

std::vector<ScriptRule> ScriptedBackend::parse_rules(const std::string& jsonl)
{
    std::vector<ScriptRule> rules;
    int line_no = 0;
    for (const auto& raw : text::split_lines(jsonl)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            auto j = nlohmann::json::parse(line);
            ScriptRule rule;
            rule.reply = j.at("reply").get<std::string>();
            if (j.contains("digest")) {
                rule.match = DigestMatch{j["digest"].get<std::string>()};
            } else {
                const auto& c = j.at("contains");
                SubstringMatch m;
                if (c.is_string())
                    m.all_of.push_back(c.get<std::string>());
                else
                    m.all_of = c.get<std::vector<std::string>>();
                rule.match = std::move(m);
            }
            rules.push_back(std::move(rule));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("script line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rules;
}

std::vector<ScriptRule> ScriptedBackend::load_rules(const std::string& path)
{
    return parse_rules(text::read_file(path));
}

} // namespace rsagent::llm
