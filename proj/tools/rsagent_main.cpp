#include "rsagent/error.hpp"
#include "rsagent/eval/counting.hpp"
#include "rsagent/eval/judge.hpp"
#include "rsagent/eval/planning.hpp"
#include "rsagent/service/app.hpp"
#include "rsagent/service/config.hpp"
#include "rsagent/service/http_server.hpp"
#include "rsagent/service/repl.hpp"
#include "rsagent/text.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <cstdlib>
#include <iostream>

using namespace rsagent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBackend = 2;
constexpr int kExitThreshold = 3;

service::HttpService* g_server = nullptr;

void on_signal(int)
{
    if (g_server) g_server->stop();
}

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string data_dir;

    bool no_inference = false;
    bool no_retrieval = false;

    std::string host;
    int port = 0;
    std::string static_dir;

    std::string input;
    std::string extractor;
    std::string export_graph;
    std::string json_out;
    std::string mode = "hybrid";
    double min_accuracy = -1.0;
    double max_relative_error = -1.0;
    std::string column = "RS-Agent";
    std::string a_label = "Baseline";
    std::string b_label = "RS-Agent";
};

service::Config resolve_config(const Options& o)
{
    auto config = o.config_path.empty() ? service::Config() : service::Config::load(o.config_path);
    config.apply_env();
    for (const auto& kv : o.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
        config.set(std::string(text::trim(kv.substr(0, eq))), std::string(text::trim(kv.substr(eq + 1))));
    }
    if (!o.data_dir.empty()) config.set("data_dir", o.data_dir);
    return config;
}

agent::SessionFlags flags_of(const Options& o)
{
    return {!o.no_inference, !o.no_retrieval};
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    if (!path.empty()) text::write_file(path, j.dump(2) + "\n");
}

int cmd_serve(const Options& o)
{
    auto config = resolve_config(o);
    if (!o.host.empty()) config.set("server.host", o.host);
    if (o.port > 0) config.set("server.port", std::to_string(o.port));
    if (!o.static_dir.empty()) config.set("server.static_dir", o.static_dir);
    auto app = service::App::build(config);

    std::string token;
    if (const char* t = std::getenv(config.get("server.api_token_env").c_str())) token = t;
    service::HttpService server(*app, token);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto host = config.get("server.host");
    const auto port = static_cast<int>(config.get_int("server.port"));
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitBackend;
    }
    return kExitOk;
}

int cmd_repl(const Options& o)
{
    auto app = service::App::build(resolve_config(o));
    service::Repl repl(*app, std::cin, std::cout, flags_of(o));
    return repl.run();
}

int cmd_ingest_solutions(const Options& o)
{
    auto app = service::App::build(resolve_config(o));
    auto docs = solution::load_solution_corpus(o.input);
    auto n = app->solutions->ingest_solutions(docs, *app->registry);
    app->save_solutions();
    std::cout << "ingested " << n << " solution documents (" << app->solutions->size() << " stored)\n";
    return kExitOk;
}

int cmd_ingest_knowledge(const Options& o)
{
    auto config = resolve_config(o);
    if (!o.extractor.empty()) config.set("extractor", o.extractor);
    // Build without the configured corpus so only <path> is ingested on top of the persisted store.
    config.set("knowledge", "");
    auto app = service::App::build(config);
    auto chunks = knowledge::load_knowledge_corpus(o.input);
    if (chunks.empty()) throw InputError("no chunks in " + o.input);
    auto summary = app->knowledge->ingest_chunks(chunks, *app->make_extractor(config.get("extractor")));
    app->save_knowledge();
    std::cout << "chunks " << summary.chunks << ", entities " << summary.entities << ", relations "
              << summary.relations << "\n";
    for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
    if (!o.export_graph.empty()) write_json(o.export_graph, app->knowledge->export_graph());
    return kExitOk;
}

int cmd_eval_plan(const Options& o)
{
    auto app = service::App::build(resolve_config(o));
    auto cases = eval::load_planning_cases(o.input);
    // Relative image paths are tried from the working directory, then next to the case file.
    const auto base = std::filesystem::path(o.input).parent_path();
    auto agent = eval::controller_agent(*app->controller, flags_of(o), [&app, base](const std::string& img) {
        if (std::filesystem::path(img).is_relative() && !std::filesystem::exists(img) &&
            std::filesystem::exists(base / img))
            return app->import_image((base / img).string());
        return app->import_image(img);
    });
    auto report =
        eval::eval_task_planning(cases, agent, static_cast<std::size_t>(app->config.get_int("eval.parallelism")));
    std::cout << eval::render_planning_table(report, o.column);
    for (const auto& out : report.outcomes)
        if (out.error) std::cerr << "case \"" << out.planning_case.query << "\" failed: " << *out.error << "\n";
    write_json(o.json_out, eval::to_json(report));
    if (o.min_accuracy >= 0 && report.average < o.min_accuracy) {
        std::cerr << "average accuracy below " << o.min_accuracy << "\n";
        return kExitThreshold;
    }
    return kExitOk;
}

int cmd_eval_count(const Options& o)
{
    auto records = eval::load_counting_records(o.input);
    auto m = eval::counting_metrics(records);
    std::cout << eval::render_counting_table(m, o.column);
    write_json(o.json_out, eval::to_json(m));
    if (o.max_relative_error >= 0 && m.relative_error > o.max_relative_error) {
        std::cerr << "relative error above " << o.max_relative_error << "\n";
        return kExitThreshold;
    }
    return kExitOk;
}

int cmd_eval_judge(const Options& o)
{
    auto app = service::App::build(resolve_config(o));
    auto pairs = eval::load_judge_pairs(o.input);
    auto rates = eval::pairwise_judge(pairs, *app->llm, app->prompts.judge,
                                      knowledge::retrieval_mode_from_string(o.mode),
                                      service::generation_params(app->config));
    std::cout << eval::render_winrate_table(std::span(&rates, 1), o.a_label, o.b_label);
    for (const auto& line : rates.log) std::cerr << line << "\n";
    write_json(o.json_out, eval::to_json(rates));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    Options o;
    CLI::App cli{"Remote sensing agent: chat service, ingestion and evaluation"};
    cli.require_subcommand(1);
    cli.add_option("-c,--config", o.config_path, "Settings file (key = value lines)")->check(CLI::ExistingFile);
    cli.add_option("--set", o.overrides, "Override a setting, key=value (repeatable)");
    cli.add_option("--data-dir", o.data_dir, "Directory for persisted stores and images");

    auto* serve = cli.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", o.host, "Bind address");
    serve->add_option("--port", o.port, "Port");
    serve->add_option("--static-dir", o.static_dir, "Serve a web client from this directory");

    auto* repl = cli.add_subcommand("repl", "Chat on the terminal");
    for (auto* sc : {repl}) {
        sc->add_flag("--no-task-inference", o.no_inference, "Skip Stage-1 task inference");
        sc->add_flag("--no-solution-retrieval", o.no_retrieval, "Skip solution retrieval");
    }

    auto* ingest_s = cli.add_subcommand("ingest-solutions", "Add solution documents (JSONL) to the store");
    ingest_s->add_option("path", o.input, "Corpus file")->required()->check(CLI::ExistingFile);

    auto* ingest_k = cli.add_subcommand("ingest-knowledge", "Add knowledge chunks to the store");
    ingest_k->add_option("path", o.input, "File or directory (.txt paragraphs or .jsonl records)")
        ->required()
        ->check(CLI::ExistingPath);
    ingest_k->add_option("--extractor", o.extractor, "Triple extractor")->check(CLI::IsMember({"mock", "llm"}));
    ingest_k->add_option("--export-graph", o.export_graph, "Write the entity/relation graph as JSON");

    auto* ev = cli.add_subcommand("eval", "Run an evaluation");
    ev->require_subcommand(1);
    auto* plan = ev->add_subcommand("plan", "First-tool planning accuracy");
    plan->add_option("file", o.input, "Planning cases (JSONL)")->required()->check(CLI::ExistingFile);
    plan->add_option("--min-accuracy", o.min_accuracy, "Exit 3 when the average is below this fraction");
    plan->add_option("--column", o.column, "Column label in the report");
    plan->add_flag("--no-task-inference", o.no_inference, "Skip Stage-1 task inference");
    plan->add_flag("--no-solution-retrieval", o.no_retrieval, "Skip solution retrieval");
    auto* count = ev->add_subcommand("count", "Object counting metrics");
    count->add_option("file", o.input, "Records (JSONL or gt,p CSV)")->required()->check(CLI::ExistingFile);
    count->add_option("--max-relative-error", o.max_relative_error, "Exit 3 when e_r exceeds this value");
    count->add_option("--method", o.column, "Method label in the report");
    auto* judge = ev->add_subcommand("judge", "Pairwise judge win rates");
    judge->add_option("file", o.input, "Pairs (JSONL)")->required()->check(CLI::ExistingFile);
    judge->add_option("--mode", o.mode, "Retrieval mode tag")->check(CLI::IsMember({"local", "global", "hybrid"}));
    judge->add_option("--a-label", o.a_label, "Label for answer_a");
    judge->add_option("--b-label", o.b_label, "Label for answer_b");
    for (auto* sc : {plan, count, judge}) sc->add_option("--json", o.json_out, "Also write the report as JSON");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (serve->parsed()) return cmd_serve(o);
        if (repl->parsed()) return cmd_repl(o);
        if (ingest_s->parsed()) return cmd_ingest_solutions(o);
        if (ingest_k->parsed()) return cmd_ingest_knowledge(o);
        if (plan->parsed()) return cmd_eval_plan(o);
        if (count->parsed()) return cmd_eval_count(o);
        if (judge->parsed()) return cmd_eval_judge(o);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBackend;
    }
    return kExitUsage;
}
