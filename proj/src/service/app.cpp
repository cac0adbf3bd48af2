#include "rsagent/service/app.hpp"

#include "rsagent/error.hpp"
#include "rsagent/llm/openai_backend.hpp"
#include "rsagent/llm/scripted_backend.hpp"
#include "rsagent/tools/adapters.hpp"

#include <filesystem>

namespace fs = std::filesystem;

namespace rsagent::service {

namespace {

llm::EndpointProfile profile_from(const Config& c, const std::string& prefix)
{
    llm::EndpointProfile p;
    p.name = prefix;
    p.base_url = c.get(prefix + ".base_url", c.get("llm.base_url"));
    p.model = c.get(prefix + ".model");
    p.api_key_env = c.get(prefix + ".api_key_env");
    p.max_retries = static_cast<int>(c.get_int("llm.max_retries"));
    p.timeout = std::chrono::milliseconds(static_cast<long long>(c.get_double("llm.timeout_s") * 1000.0));
    if (p.base_url.empty()) throw ConfigError(prefix + ".base_url is not set");
    if (p.model.empty()) throw ConfigError(prefix + ".model is not set");
    return p;
}

// tools.<name>.command / tools.<name>.url rebind a mock to an external model.
void bind_adapters(const Config& c, tools::ToolRegistry& registry, const std::shared_ptr<tools::ImageStore>& images)
{
    for (const auto& key : c.keys_with_prefix("tools.")) {
        auto rest = key.substr(6);
        auto dot = rest.rfind('.');
        if (dot == std::string::npos) continue;
        const auto tool = rest.substr(0, dot);
        const auto what = rest.substr(dot + 1);
        if (what != "command" && what != "url") continue;
        if (!registry.contains(tool)) throw ConfigError("setting " + key + " names an unknown tool");
        const auto timeout = std::chrono::milliseconds(
            static_cast<long long>((c.has("tools." + tool + ".timeout_s") ? c.get_double("tools." + tool + ".timeout_s") : 300.0) * 1000.0));
        if (what == "command") {
            const int pool = c.has("tools." + tool + ".pool") ? static_cast<int>(c.get_int("tools." + tool + ".pool")) : 1;
            registry.rebind(tool, std::make_shared<tools::SubprocessExecutor>(c.get(key), images, pool, timeout));
        } else {
            registry.rebind(tool, std::make_shared<tools::HttpExecutor>(c.get(key), images, timeout));
        }
    }
}

} // namespace

llm::GenerationParams generation_params(const Config& c)
{
    llm::GenerationParams p;
    p.temperature = c.get_double("llm.temperature");
    p.max_tokens = static_cast<int>(c.get_int("llm.max_tokens"));
    if (c.has("llm.seed")) p.seed = c.get_int("llm.seed");
    try {
        llm::validate(p);
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

std::shared_ptr<llm::ChatBackend> make_chat_backend(const Config& c)
{
    const auto kind = c.get("llm.backend");
    if (kind == "scripted") {
        auto backend = std::make_shared<llm::ScriptedBackend>();
        if (c.has("llm.script")) {
            auto rules = llm::ScriptedBackend::load_rules(c.get("llm.script"));
            if (!rules.empty()) backend->register_script(std::move(rules));
        }
        return backend;
    }
    if (kind == "openai") return std::make_shared<llm::OpenAiBackend>(profile_from(c, "llm"));
    throw ConfigError("llm.backend must be 'scripted' or 'openai', got '" + kind + "'");
}

std::shared_ptr<const index::Embedder> make_embedder(const Config& c)
{
    const auto kind = c.get("embedder");
    const auto dim = c.get_int("embedder.dimension");
    if (dim < 1) throw ConfigError("embedder.dimension must be positive");
    if (kind == "hash") return std::make_shared<index::HashingEmbedder>(static_cast<std::size_t>(dim));
    if (kind == "remote")
        return std::make_shared<index::RemoteEmbedder>(profile_from(c, "embedder"), static_cast<std::size_t>(dim));
    throw ConfigError("embedder must be 'hash' or 'remote', got '" + kind + "'");
}

std::unique_ptr<App> App::build(const Config& config)
{
    auto app = std::make_unique<App>();
    app->config = config;
    const fs::path data(config.get("data_dir"));
    fs::create_directories(data);

    app->llm = make_chat_backend(config);
    app->embedder = make_embedder(config);
    app->images = std::make_shared<tools::ImageStore>(data / "images");
    app->catalog = config.has("fixtures") ? std::make_shared<tools::FixtureCatalog>(config.get("fixtures"))
                                          : std::make_shared<tools::FixtureCatalog>();
    app->prompts = config.has("prompt_dir") ? agent::PromptSet::from_dir(config.get("prompt_dir"))
                                            : agent::PromptSet::builtin();

    app->registry = std::make_shared<tools::ToolRegistry>();
    tools::register_mock_image_tools(*app->registry, {app->images, app->catalog});

    app->knowledge = std::make_shared<knowledge::KnowledgeStore>(app->embedder);
    app->search.top_n = static_cast<int>(config.get_int("retrieval.top_n"));
    app->search.mode = knowledge::retrieval_mode_from_string(config.get("retrieval.mode"));
    app->search.global_only = config.get_bool("retrieval.global_only");
    knowledge::register_knowledge_search(*app->registry, app->knowledge, app->search);
    bind_adapters(config, *app->registry, app->images);

    app->solutions = std::make_shared<solution::SolutionStore>(app->embedder);
    if (fs::exists(fs::path(app->solutions_dir()) / "solutions.jsonl"))
        app->solutions->load(app->solutions_dir());
    else if (config.has("solutions"))
        app->solutions->ingest_solutions(solution::load_solution_corpus(config.get("solutions")), *app->registry);

    if (fs::exists(fs::path(app->knowledge_dir()) / "knowledge.json"))
        app->knowledge->load(app->knowledge_dir());
    else if (config.has("knowledge"))
        app->knowledge->ingest_chunks(knowledge::load_knowledge_corpus(config.get("knowledge")),
                                      *app->make_extractor(config.get("extractor")));

    agent::ControllerConfig cc;
    cc.max_steps = static_cast<int>(config.get_int("controller.max_steps"));
    cc.history_turns = static_cast<std::size_t>(config.get_int("controller.history_turns"));
    cc.summarize_history = config.get_bool("controller.summarize_history");
    cc.params = generation_params(config);
    app->controller = std::make_shared<agent::Controller>(app->llm, app->solutions, app->registry, app->prompts, cc);
    app->sessions = std::make_shared<agent::SessionStore>();
    return app;
}

std::string App::import_image(const std::string& path_or_ref) const
{
    if (tools::ImageStore::is_valid_ref(path_or_ref) && images->exists(path_or_ref)) return path_or_ref;
    if (!fs::exists(path_or_ref)) throw InputError("image not found: " + path_or_ref);
    return images->import_file(path_or_ref);
}

std::unique_ptr<knowledge::Extractor> App::make_extractor(const std::string& kind) const
{
    if (kind == "mock") return std::make_unique<knowledge::MockExtractor>();
    if (kind == "llm")
        return std::make_unique<knowledge::LlmExtractor>(llm, prompts.extract.system, prompts.extract.user,
                                                         generation_params(config));
    throw ConfigError("extractor must be 'mock' or 'llm', got '" + kind + "'");
}

std::string App::solutions_dir() const
{
    return (fs::path(config.get("data_dir")) / "solutions").string();
}

std::string App::knowledge_dir() const
{
    return (fs::path(config.get("data_dir")) / "knowledge").string();
}

void App::save_solutions() const
{
    solutions->save(solutions_dir());
}

void App::save_knowledge() const
{
    knowledge->save(knowledge_dir());
}

} // namespace rsagent::service
