#include "rsagent/knowledge/search_tool.hpp"

#include "rsagent/error.hpp"
#include "rsagent/knowledge/keywords.hpp"
#include "rsagent/text.hpp"
#include "rsagent/tools/mock_tools.hpp"

#include <cstdio>

namespace rsagent::knowledge {

namespace {

constexpr std::size_t kSnippetBytes = 400;

// Chunk text without the triple lines the mock extractor reads.
std::string snippet(const std::string& chunk_text)
{
    std::vector<std::string> kept;
    for (const auto& line : text::split_lines(chunk_text))
        if (parse_triple_lines(line).triples.empty() && !text::trim(line).empty()) kept.emplace_back(text::trim(line));
    auto s = text::join(kept, " ");
    if (s.empty()) s = std::string(text::trim(chunk_text));
    if (s.size() > kSnippetBytes) {
        auto cut = kSnippetBytes;
        while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut; // keep UTF-8 whole
        s = s.substr(0, cut) + "...";
    }
    return s;
}

} // namespace

std::string render_guidance(const KnowledgeGuidance& guidance)
{
    if (guidance.documents.empty()) return "Knowledge guidance: no matching documents.";
    std::string out = "Knowledge guidance (" + std::to_string(guidance.documents.size()) + " documents):";
    std::size_t i = 0;
    for (const auto& d : guidance.documents) {
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", d.score);
        out += "\n[" + std::to_string(++i) + "] " + d.chunk_id + " (" +
               (d.path == RetrievalPath::Global ? std::string("global") : "keyword: " + d.keyword) + ", " + score +
               ") " + snippet(d.text);
    }
    return out;
}

KnowledgeSearchExecutor::KnowledgeSearchExecutor(std::shared_ptr<const KnowledgeStore> store, SearchSettings settings)
    : store_(std::move(store)), settings_(settings)
{
    if (!store_) throw ConfigError("knowledge_search needs a knowledge store");
    if (settings_.top_n < 1) throw ConfigError("knowledge_search: N must be at least 1");
}

tools::ToolOutput KnowledgeSearchExecutor::run(const tools::ToolDescriptor& descriptor, const tools::ToolInput& input)
{
    auto keywords = parse_weighted_keywords(input.text_args);
    if (keywords.empty())
        throw ToolExecutionError(descriptor.name, "no keywords in input", input.text_args);
    auto guidance = store_->dual_retrieve(keywords, settings_.top_n, settings_.mode, settings_.global_only);
    return {render_guidance(guidance), std::nullopt, to_json(guidance)};
}

void register_knowledge_search(tools::ToolRegistry& registry, std::shared_ptr<const KnowledgeStore> store,
                               SearchSettings settings)
{
    registry.register_tool(tools::knowledge_search_descriptor(),
                           std::make_shared<KnowledgeSearchExecutor>(std::move(store), settings));
}

} // namespace rsagent::knowledge
