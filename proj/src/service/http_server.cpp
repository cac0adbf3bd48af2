#include "rsagent/service/http_server.hpp"

#include "rsagent/error.hpp"
#include "rsagent/eval/counting.hpp"
#include "rsagent/eval/judge.hpp"
#include "rsagent/eval/planning.hpp"
#include "rsagent/text.hpp"

#include <httplib.h>

#include <filesystem>

namespace rsagent::service {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message)
{
    reply(res, status, {{"error", message}});
}

// Status for an error raised while serving a request.
int status_for(const std::exception& e)
{
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const IngestError*>(&e)) return 400;
    if (dynamic_cast<const ToolNotFoundError*>(&e)) return 400;
    if (dynamic_cast<const EmptyIndexError*>(&e)) return 409;
    if (dynamic_cast<const agent::PlanningError*>(&e) || dynamic_cast<const ToolExecutionError*>(&e)) return 422;
    if (dynamic_cast<const NetworkError*>(&e) || dynamic_cast<const ProtocolError*>(&e) ||
        dynamic_cast<const ScriptMissError*>(&e))
        return 502;
    return 500;
}

json parse_body(const httplib::Request& req)
{
    if (text::trim(req.body).empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed JSON body: ") + e.what());
    }
}

std::string content_type_for(const std::string& ref)
{
    auto ext = text::to_lower(std::filesystem::path(ref).extension().string());
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".tif" || ext == ".tiff") return "image/tiff";
    if (ext == ".bmp") return "image/bmp";
    return "application/octet-stream";
}

std::string extension_of(const std::string& filename, const std::string& content_type)
{
    auto ext = std::filesystem::path(filename).extension().string();
    if (!ext.empty()) return text::to_lower(ext.substr(1));
    if (content_type == "image/jpeg") return "jpg";
    if (content_type == "image/tiff") return "tif";
    return "png";
}

// Wraps a handler so library errors become JSON error replies.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn)
{
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const std::exception& e) {
            fail(res, status_for(e), e.what());
        }
    };
}

} // namespace

json to_json(const ChatEventFrame& frame)
{
    return {{"seq", frame.seq}, {"kind", frame.kind}, {"payload", frame.payload}};
}

json frame_payload(const agent::TraceEvent& event)
{
    auto j = agent::to_json(event);
    j.erase("kind");
    if (const auto* fa = std::get_if<agent::FinalAnswer>(&event); fa && fa->image_ref)
        j["image_url"] = "/images/" + *fa->image_ref;
    return j;
}

HttpService::HttpService(App& app, std::string api_token)
    : app_(app), token_(std::move(api_token)), server_(std::make_unique<httplib::Server>())
{
    install_routes();
}

HttpService::~HttpService() = default;

bool HttpService::listen(const std::string& host, int port)
{
    return server_->listen(host, port);
}

int HttpService::bind_any_port(const std::string& host)
{
    return server_->bind_to_any_port(host);
}

bool HttpService::listen_after_bind()
{
    return server_->listen_after_bind();
}

void HttpService::stop()
{
    server_->stop();
}

bool HttpService::is_running() const
{
    return server_->is_running();
}

void HttpService::install_routes()
{
    auto& s = *server_;
    App& app = app_;

    if (!token_.empty()) {
        s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            static const char* open_prefixes[] = {"/health"};
            for (const char* p : open_prefixes)
                if (req.path.rfind(p, 0) == 0) return httplib::Server::HandlerResponse::Unhandled;
            const bool api = req.path.rfind("/sessions", 0) == 0 || req.path.rfind("/tools", 0) == 0 ||
                             req.path.rfind("/ingest", 0) == 0 || req.path.rfind("/eval", 0) == 0 ||
                             req.path.rfind("/images", 0) == 0;
            if (!api) return httplib::Server::HandlerResponse::Unhandled;
            if (req.get_header_value("Authorization") == "Bearer " + token_)
                return httplib::Server::HandlerResponse::Unhandled;
            fail(res, 401, "missing or invalid bearer token");
            return httplib::Server::HandlerResponse::Handled;
        });
    }

    s.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"status", "ok"}}); });

    s.Post("/sessions", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        auto flags = agent::flags_from_json(body.contains("flags") ? body["flags"] : json(nullptr));
        auto session = app.sessions->create(flags);
        reply(res, 201,
              {{"session_id", session.session_id},
               {"created_at_ms", session.created_at_ms},
               {"flags", agent::to_json(session.flags)}});
    }));

    s.Get(R"(/sessions/([A-Za-z0-9_-]+))", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        auto snap = app.sessions->snapshot(req.matches[1]);
        if (!snap) return fail(res, 404, "unknown session");
        reply(res, 200, agent::to_json(*snap));
    }));

    s.Post(R"(/sessions/([A-Za-z0-9_-]+)/messages)", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        if (!app.sessions->contains(id)) return fail(res, 404, "unknown session");

        std::string query;
        std::optional<std::string> image_ref;
        if (req.is_multipart_form_data()) {
            if (req.has_file("text")) query = req.get_file_value("text").content;
            if (req.has_file("image")) {
                const auto& file = req.get_file_value("image");
                if (!file.content.empty())
                    image_ref = app.images->put(file.content, extension_of(file.filename, file.content_type));
            }
        } else {
            auto body = parse_body(req);
            query = body.value("text", "");
            if (body.contains("image_ref") && !body["image_ref"].is_null()) {
                auto ref = body["image_ref"].get<std::string>();
                if (!tools::ImageStore::is_valid_ref(ref) || !app.images->exists(ref))
                    return fail(res, 400, "unknown image_ref");
                image_ref = ref;
            }
        }
        if (text::trim(query).empty()) return fail(res, 400, "text is empty");

        std::vector<ChatEventFrame> frames;
        int status = 200;
        bool found = app.sessions->with_session(id, [&](agent::SessionState& session) {
            json user{{"text", query}};
            user["image_ref"] = image_ref ? json(*image_ref) : json(nullptr);
            frames.push_back({session.next_frame_seq++, "user_message", user});
            try {
                app.controller->handle_query(session, query, image_ref, [&](const agent::TraceEvent& e) {
                    frames.push_back({session.next_frame_seq++, std::string(agent::event_kind(e)), frame_payload(e)});
                });
            } catch (const std::exception& e) {
                status = status_for(e);
                frames.push_back({session.next_frame_seq++, "error", {{"message", e.what()}, {"status", status}}});
            }
        });
        if (!found) return fail(res, 404, "unknown session");
        json out = json::array();
        for (const auto& f : frames) out.push_back(to_json(f));
        reply(res, status, {{"session_id", id}, {"frames", out}});
    }));

    s.Get("/tools", guarded([&app](const httplib::Request&, httplib::Response& res) {
        json list = json::array();
        for (const auto& d : app.registry->describe_tools()) list.push_back(tools::to_json(d));
        reply(res, 200, {{"tools", list}});
    }));

    s.Post("/ingest/solutions", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        std::vector<solution::SolutionDocument> docs;
        if (req.get_header_value("Content-Type").find("application/json") != std::string::npos) {
            auto body = parse_body(req);
            for (const auto& d : body.at("documents")) docs.push_back(solution::solution_from_json(d));
        } else {
            docs = solution::parse_solution_corpus(req.body);
        }
        auto n = app.solutions->ingest_solutions(docs, *app.registry);
        if (req.has_param("persist") && req.get_param_value("persist") == "1") app.save_solutions();
        reply(res, 200, {{"ingested", n}, {"total", app.solutions->size()}});
    }));

    s.Post("/ingest/knowledge", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        std::vector<knowledge::ChunkInput> chunks;
        for (const auto& c : body.at("chunks")) {
            if (c.is_string())
                chunks.push_back({c.get<std::string>(), ""});
            else
                chunks.push_back({c.at("text").get<std::string>(), c.value("source_ref", "")});
        }
        auto extractor = app.make_extractor(body.value("extractor", app.config.get("extractor")));
        auto summary = app.knowledge->ingest_chunks(chunks, *extractor);
        if (body.value("persist", false)) app.save_knowledge();
        reply(res, 200,
              {{"chunks", summary.chunks},
               {"entities", summary.entities},
               {"relations", summary.relations},
               {"warnings", summary.warnings}});
    }));

    s.Post("/eval/plan", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        std::vector<eval::PlanningCase> cases;
        for (const auto& c : body.at("cases")) {
            eval::PlanningCase pc{c.at("query"), c.at("expected_first_tool"), c.at("task_label"), std::nullopt};
            if (c.contains("image") && !c["image"].is_null()) pc.image = c["image"].get<std::string>();
            cases.push_back(std::move(pc));
        }
        auto flags = agent::flags_from_json(body.contains("flags") ? body["flags"] : json(nullptr));
        auto agent = eval::controller_agent(*app.controller, flags,
                                            [&app](const std::string& img) { return app.import_image(img); });
        auto report = eval::eval_task_planning(cases, agent,
                                               static_cast<std::size_t>(app.config.get_int("eval.parallelism")));
        auto j = eval::to_json(report);
        j["table"] = eval::render_planning_table(report);
        reply(res, 200, j);
    }));

    s.Post("/eval/count", guarded([](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        std::vector<eval::CountingRecord> records;
        for (const auto& r : body.at("records")) records.push_back({r.at("gt"), r.at("p")});
        auto m = eval::counting_metrics(records);
        auto j = eval::to_json(m);
        j["table"] = eval::render_counting_table(m);
        reply(res, 200, j);
    }));

    s.Post("/eval/judge", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        std::vector<eval::JudgePair> pairs;
        for (const auto& p : body.at("pairs")) pairs.push_back({p.at("question"), p.at("answer_a"), p.at("answer_b")});
        auto mode = knowledge::retrieval_mode_from_string(body.value("mode", "hybrid"));
        auto rates = eval::pairwise_judge(pairs, *app.llm, app.prompts.judge, mode, generation_params(app.config));
        auto j = eval::to_json(rates);
        j["table"] = eval::render_winrate_table(std::span(&rates, 1));
        reply(res, 200, j);
    }));

    s.Get(R"(/images/([0-9a-f]{64}\.[A-Za-z0-9]+))", guarded([&app](const httplib::Request& req, httplib::Response& res) {
        const std::string ref = req.matches[1];
        if (!app.images->exists(ref)) return fail(res, 404, "unknown image");
        res.status = 200;
        res.set_content(app.images->read(ref), content_type_for(ref));
    }));

    if (app.config.has("server.static_dir")) {
        const auto dir = app.config.get("server.static_dir");
        if (!s.set_mount_point("/", dir)) throw ConfigError("server.static_dir is not a directory: " + dir);
    }
}

} // namespace rsagent::service
