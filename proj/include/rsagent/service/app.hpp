#pragma once

#include "rsagent/agent/controller.hpp"
#include "rsagent/agent/session.hpp"
#include "rsagent/index/embedder.hpp"
#include "rsagent/knowledge/extractor.hpp"
#include "rsagent/knowledge/knowledge_store.hpp"
#include "rsagent/knowledge/search_tool.hpp"
#include "rsagent/llm/backend.hpp"
#include "rsagent/service/config.hpp"
#include "rsagent/solution/solution_store.hpp"
#include "rsagent/tools/image_store.hpp"
#include "rsagent/tools/mock_tools.hpp"
#include "rsagent/tools/registry.hpp"

#include <memory>
#include <string>

namespace rsagent::service {

/// Everything a running agent needs, wired from one Config.
///
/// Stores persist under data_dir (solutions/, knowledge/, images/). At
/// startup a persisted store is loaded; otherwise the corpus named by the
/// `solutions` / `knowledge` settings, if any, is ingested in memory.
struct App {
    Config config;
    std::shared_ptr<llm::ChatBackend> llm;
    std::shared_ptr<const index::Embedder> embedder;
    std::shared_ptr<tools::ImageStore> images;
    std::shared_ptr<const tools::FixtureCatalog> catalog;
    std::shared_ptr<tools::ToolRegistry> registry;
    std::shared_ptr<solution::SolutionStore> solutions;
    std::shared_ptr<knowledge::KnowledgeStore> knowledge;
    knowledge::SearchSettings search;
    agent::PromptSet prompts;
    std::shared_ptr<agent::Controller> controller;
    std::shared_ptr<agent::SessionStore> sessions;

    /// Throws ConfigError for unusable settings.
    static std::unique_ptr<App> build(const Config& config);

    /// A store ref is returned as-is; a file path is imported first.
    std::string import_image(const std::string& path_or_ref) const;

    /// "mock" or "llm".
    std::unique_ptr<knowledge::Extractor> make_extractor(const std::string& kind) const;

    std::string solutions_dir() const;
    std::string knowledge_dir() const;
    void save_solutions() const;
    void save_knowledge() const;
};

std::shared_ptr<llm::ChatBackend> make_chat_backend(const Config& config);
std::shared_ptr<const index::Embedder> make_embedder(const Config& config);
llm::GenerationParams generation_params(const Config& config);

} // namespace rsagent::service
