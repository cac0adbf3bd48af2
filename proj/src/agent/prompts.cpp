#include "rsagent/agent/prompts.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <filesystem>
#include <vector>

namespace rsagent::agent {

namespace detail {
const std::map<std::string, std::string_view, std::less<>>& embedded_prompts();
}

namespace {

std::string strip_trailing_newlines(std::string s)
{
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

PromptTemplate load_builtin(const std::string& file)
{
    const auto& assets = detail::embedded_prompts();
    auto it = assets.find(file);
    if (it == assets.end()) throw ConfigError("missing builtin prompt " + file);
    return PromptTemplate::parse(it->second, file);
}

PromptTemplate load_from(const std::string& dir, const std::string& file)
{
    auto path = std::filesystem::path(dir) / file;
    if (!std::filesystem::exists(path)) return load_builtin(file);
    return PromptTemplate::parse(text::read_file(path.string()), path.string());
}

} // namespace

PromptTemplate PromptTemplate::parse(std::string_view text, std::string_view name)
{
    PromptTemplate out;
    std::string* section = nullptr;
    bool seen_system = false;
    bool seen_user = false;
    for (const auto& line : text::split_lines(text)) {
        auto t = text::trim(line);
        if (t == "[system]") {
            section = &out.system;
            seen_system = true;
            continue;
        }
        if (t == "[user]") {
            section = &out.user;
            seen_user = true;
            continue;
        }
        if (!section) {
            if (t.empty()) continue;
            throw ConfigError(std::string(name) + ": text before the first [system]/[user] section");
        }
        *section += line;
        *section += '\n';
    }
    if (!seen_system || !seen_user) throw ConfigError(std::string(name) + ": needs [system] and [user] sections");
    out.system = strip_trailing_newlines(std::move(out.system));
    out.user = strip_trailing_newlines(std::move(out.user));
    return out;
}

std::string render(std::string_view tmpl, const PromptValues& values)
{
    std::vector<std::string> kept;
    for (auto line : text::split_lines(tmpl)) {
        bool drop = false;
        for (const auto& [key, value] : values) {
            const auto placeholder = "{" + key + "}";
            if (line.find(placeholder) == std::string::npos) continue;
            if (!value) {
                drop = true;
                break;
            }
        }
        if (drop) continue;
        // Substitute in one left-to-right pass so values are never re-expanded.
        std::string out;
        std::size_t pos = 0;
        while (pos < line.size()) {
            auto open = line.find('{', pos);
            if (open == std::string::npos) break;
            auto close = line.find('}', open);
            if (close == std::string::npos) break;
            auto it = values.find(std::string_view(line).substr(open + 1, close - open - 1));
            out.append(line, pos, open - pos);
            if (it != values.end()) {
                out += *it->second;
                pos = close + 1;
            } else {
                out += '{';
                pos = open + 1;
            }
        }
        out.append(line, pos, std::string::npos);
        kept.push_back(std::move(out));
    }
    return text::join(kept, "\n");
}

PromptSet PromptSet::builtin()
{
    return {load_builtin("stage1.txt"),   load_builtin("stage2.txt"),  load_builtin("keywords.txt"),
            load_builtin("judge.txt"),    load_builtin("extract.txt"), load_builtin("summarize.txt")};
}

PromptSet PromptSet::from_dir(const std::string& dir)
{
    if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory not found: " + dir);
    return {load_from(dir, "stage1.txt"), load_from(dir, "stage2.txt"),  load_from(dir, "keywords.txt"),
            load_from(dir, "judge.txt"),  load_from(dir, "extract.txt"), load_from(dir, "summarize.txt")};
}

} // namespace rsagent::agent
