#pragma once

#include "rsagent/llm/backend.hpp"

#include <string>
#include <variant>
#include <vector>

namespace rsagent::llm {

/// Matches a prompt whose canonical digest equals `digest`.
struct DigestMatch {
    std::string digest;
    bool operator==(const DigestMatch&) const = default;
};

/// Matches a prompt whose transcript_text() contains every listed substring.
struct SubstringMatch {
    std::vector<std::string> all_of;
    bool operator==(const SubstringMatch&) const = default;
};

using ScriptMatch = std::variant<DigestMatch, SubstringMatch>;

struct ScriptRule {
    ScriptMatch match;
    /// Reply text. "{{last_tool_output}}" expands to the content of the most
    /// recent tool-role message in the prompt (empty if none).
    std::string reply;
};

/// Deterministic offline backend: replies come from a rule table consulted
/// in registration order; the first matching rule wins.
class ScriptedBackend final : public ChatBackend {
public:
    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<ScriptRule> rules);

    /// Appends rules. Throws InputError on an empty list and ConfigError
    /// when a match key repeats one already registered.
    void register_script(std::vector<ScriptRule> rules);

    ChatCompletion complete(std::span<const ChatMessage> messages,
                            const GenerationParams& params) override;

    std::string name() const override { return "scripted"; }

    std::size_t rule_count() const noexcept { return rules_.size(); }

    /// Reads JSON-lines rules:
    ///   {"digest": "<hex>", "reply": "..."}
    ///   {"contains": "text" | ["a", "b"], "reply": "..."}
    /// Blank lines and lines starting with '#' are skipped.
    static std::vector<ScriptRule> load_rules(const std::string& path);
    static std::vector<ScriptRule> parse_rules(const std::string& jsonl);

private:
    std::vector<ScriptRule> rules_;
};

} // namespace rsagent::llm
