#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace rsagent::agent {

/// A two-message prompt. Asset files hold a "[system]" section followed by
/// a "[user]" section.
struct PromptTemplate {
    std::string system;
    std::string user;

    static PromptTemplate parse(std::string_view text, std::string_view name = "prompt");
};

/// Placeholder values for render(). A placeholder mapped to nullopt removes
/// every template line that mentions it.
using PromptValues = std::map<std::string, std::optional<std::string>, std::less<>>;

/// Replaces "{name}" with its value. Unknown placeholders are left alone.
std::string render(std::string_view tmpl, const PromptValues& values);

struct PromptSet {
    PromptTemplate stage1;    // {supported tasks}, {Q}
    PromptTemplate stage2;    // {tools}, {Q}, {input image}, {solution guidance}, {conversation_history}
    PromptTemplate keywords;  // {Q}
    PromptTemplate judge;     // {question}, {answer 1}, {answer 2}
    PromptTemplate extract;   // {chunk}
    PromptTemplate summarize; // {conversation}

    /// The templates compiled into the binary.
    static PromptSet builtin();
    /// Reads <dir>/<name>.txt where present, the builtin template otherwise.
    static PromptSet from_dir(const std::string& dir);
};

} // namespace rsagent::agent
