#pragma once

#include "rsagent/knowledge/knowledge_store.hpp"
#include "rsagent/tools/registry.hpp"

#include <memory>

namespace rsagent::knowledge {

struct SearchSettings {
    int top_n = 30; // N, applied to each retrieval path
    RetrievalMode mode = RetrievalMode::Hybrid;
    bool global_only = false; // single concatenated query, no keyword path
};

/// knowledge_search: parses weighted keywords from the tool input and runs
/// dual_retrieve. The payload is the KnowledgeGuidance as JSON.
class KnowledgeSearchExecutor final : public tools::ToolExecutor {
public:
    KnowledgeSearchExecutor(std::shared_ptr<const KnowledgeStore> store, SearchSettings settings = {});

    tools::ToolOutput run(const tools::ToolDescriptor& descriptor, const tools::ToolInput& input) override;

    const SearchSettings& settings() const noexcept { return settings_; }

private:
    std::shared_ptr<const KnowledgeStore> store_;
    SearchSettings settings_;
};

/// Plain-text rendering handed back to the planner.
std::string render_guidance(const KnowledgeGuidance& guidance);

void register_knowledge_search(tools::ToolRegistry& registry, std::shared_ptr<const KnowledgeStore> store,
                               SearchSettings settings = {});

} // namespace rsagent::knowledge
