#include "rsagent/knowledge/extractor.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <optional>

namespace rsagent::knowledge {

namespace {

constexpr std::string_view kEmDash = "\xE2\x80\x94"; // U+2014
constexpr std::string_view kArrow = "\xE2\x86\x92";  // U+2192

std::optional<ExtractedTriple> parse_line(std::string_view line)
{
    line = text::trim(line);
    if (line.empty()) return std::nullopt;

    std::size_t arrow = line.find(kArrow);
    std::size_t arrow_len = kArrow.size();
    std::size_t dash = std::string_view::npos;
    std::size_t dash_len = 0;
    if (arrow != std::string_view::npos) {
        dash = line.rfind(kEmDash, arrow);
        dash_len = kEmDash.size();
    }
    if (dash == std::string_view::npos) {
        arrow = line.find("->");
        arrow_len = 2;
        if (arrow == std::string_view::npos) return std::nullopt;
        // "F-16 -operated_by-> X": the relation starts at the last " -" before the arrow.
        dash = line.substr(0, arrow).rfind(" -");
        if (dash == std::string_view::npos) return std::nullopt;
        dash += 1;
        dash_len = 1;
    }

    auto head = text::trim(line.substr(0, dash));
    auto rel = text::trim(line.substr(dash + dash_len, arrow - dash - dash_len));
    auto tail = text::trim(line.substr(arrow + arrow_len));
    if (!rel.empty() && rel.back() == '-') rel = text::trim(rel.substr(0, rel.size() - 1));
    if (head.empty() || rel.empty() || tail.empty()) return std::nullopt;
    return ExtractedTriple{std::string(head), std::string(rel), std::string(tail)};
}

} // namespace

Extraction parse_triple_lines(std::string_view text)
{
    Extraction out;
    for (const auto& line : text::split_lines(text))
        if (auto t = parse_line(line)) out.triples.push_back(std::move(*t));
    return out;
}

LlmExtractor::LlmExtractor(std::shared_ptr<llm::ChatBackend> backend, std::string system_prompt,
                           std::string user_template, llm::GenerationParams params)
    : backend_(std::move(backend)), system_prompt_(std::move(system_prompt)),
      user_template_(std::move(user_template)), params_(params)
{
    if (!backend_) throw ConfigError("LlmExtractor needs a chat backend");
}

Extraction LlmExtractor::extract(std::string_view chunk_text) const
{
    std::vector<llm::ChatMessage> messages{
        llm::ChatMessage::system(system_prompt_),
        llm::ChatMessage::user(text::replace_all(user_template_, "{chunk}", chunk_text)),
    };
    auto reply = llm::complete_chat(messages, params_, *backend_);
    return parse_triple_lines(reply.content);
}

} // namespace rsagent::knowledge
