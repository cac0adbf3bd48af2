#include "support.hpp"

#include "rsagent/error.hpp"
#include "rsagent/llm/wire.hpp"
#include "rsagent/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <random>
#include <set>

namespace fs = std::filesystem;

namespace rsagent::fixtures {

fs::path source_dir()
{
    return fs::path(RSAGENT_SOURCE_DIR);
}

fs::path data_path(const std::string& rel)
{
    return source_dir() / "data" / rel;
}

fs::path golden_path(const std::string& rel)
{
    return source_dir() / "tests" / "golden" / rel;
}

TempDir::TempDir(const std::string& prefix)
{
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto candidate = fs::temp_directory_path() /
                         (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        if (fs::create_directories(candidate)) {
            path_ = candidate;
            return;
        }
    }
    throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

service::Config offline_config(const std::string& data_dir)
{
    service::Config c;
    c.set("data_dir", data_dir);
    c.set("llm.backend", "scripted");
    c.set("llm.script", data_path("scripts/golden.jsonl").string());
    c.set("solutions", data_path("solutions.jsonl").string());
    c.set("knowledge", data_path("knowledge/aircraft.jsonl").string());
    c.set("fixtures", data_path("images").string());
    c.set("retrieval.top_n", "5");
    return c;
}

std::vector<eval::PlanningCase> golden_cases()
{
    return eval::load_planning_cases(data_path("eval/planning_golden.jsonl").string());
}

std::vector<agent::AgentTrace> run_golden_cases(service::App& app)
{
    auto agent = eval::controller_agent(*app.controller, {}, [&app](const std::string& img) {
        return app.import_image((data_path("eval") / img).lexically_normal().string());
    });
    std::vector<agent::AgentTrace> out;
    for (const auto& c : golden_cases()) out.push_back(agent(c));
    return out;
}

std::string golden_trace_name(std::size_t index, const eval::PlanningCase& c)
{
    std::string slug;
    for (const auto& tok : text::tokenize(c.query)) {
        if (!slug.empty()) slug += '-';
        slug += tok;
    }
    if (slug.size() > 48) slug.resize(48);
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02zu-", index + 1);
    return std::string(prefix) + slug + ".json";
}

bool updating_golden()
{
    const char* v = std::getenv("RSAGENT_UPDATE_GOLDEN");
    return v && std::string(v) == "1";
}

std::optional<std::string> check_golden(const std::string& rel, const std::string& actual)
{
    const auto path = golden_path(rel);
    if (updating_golden()) {
        fs::create_directories(path.parent_path());
        text::write_file(path.string(), actual);
        return std::nullopt;
    }
    if (!fs::exists(path)) return "missing golden file " + path.string();
    const auto expected = text::read_file(path.string());
    if (expected == actual) return std::nullopt;
    std::size_t at = 0;
    while (at < expected.size() && at < actual.size() && expected[at] == actual[at]) ++at;
    return rel + " differs at byte " + std::to_string(at) + ": expected \"" + expected.substr(at, 60) +
           "\", got \"" + actual.substr(at, 60) + "\"";
}

FakeOpenAiServer::FakeOpenAiServer(std::shared_ptr<llm::ChatBackend> backend,
                                   std::shared_ptr<const index::Embedder> embedder)
    : backend_(std::move(backend)), embedder_(std::move(embedder)), server_(std::make_unique<httplib::Server>())
{
    auto guard = [this](const httplib::Request& req, httplib::Response& res) {
        ++requests_;
        last_request_ = req.body;
        last_auth_ = req.get_header_value("Authorization");
        if (fail_count_ > 0) {
            --fail_count_;
            res.status = fail_status_;
            res.set_content(R"({"error":{"message":"injected failure"}})", "application/json");
            return false;
        }
        if (!raw_once_.empty()) {
            res.set_content(std::exchange(raw_once_, {}), "application/json");
            return false;
        }
        return true;
    };
    server_->Post("/v1/chat/completions", [this, guard](const httplib::Request& req, httplib::Response& res) {
        if (!guard(req, res)) return;
        try {
            auto request = llm::wire::parse_request(req.body);
            std::vector<llm::ChatMessage> messages;
            for (const auto& m : request.messages) messages.push_back({m.role, m.content, {}});
            llm::wire::ChatResponse response{"chatcmpl-fake", request.model,
                                             backend_->complete(messages, request.params)};
            res.set_content(llm::wire::serialize_response(response), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
        }
    });
    server_->Post("/v1/embeddings", [this, guard](const httplib::Request& req, httplib::Response& res) {
        if (!guard(req, res)) return;
        if (!embedder_) {
            res.status = 404;
            return;
        }
        auto body = nlohmann::json::parse(req.body);
        auto v = embedder_->embed(body.at("input").get<std::string>());
        nlohmann::json emb(std::vector<float>(v.values().begin(), v.values().end()));
        res.set_content(nlohmann::json{{"data", {{{"index", 0}, {"embedding", emb}}}}, {"model", body.value("model", "")}}.dump(),
                        "application/json");
    });
    port_ = server_->bind_to_any_port("127.0.0.1");
    if (port_ <= 0) throw std::runtime_error("fake endpoint: cannot bind");
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

FakeOpenAiServer::~FakeOpenAiServer()
{
    server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::string FakeOpenAiServer::base_url() const
{
    return "http://127.0.0.1:" + std::to_string(port_);
}

void FakeOpenAiServer::fail_next(int count, int status)
{
    fail_status_ = status;
    fail_count_ = count;
}

void FakeOpenAiServer::reply_raw_once(std::string body)
{
    raw_once_ = std::move(body);
}

double oracle_cosine(std::span<const float> a, std::span<const float> b)
{
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    double s = dot / (std::sqrt(na) * std::sqrt(nb));
    return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
}

namespace {

void sort_hits(std::vector<OracleHit>& hits)
{
    std::stable_sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

} // namespace

std::vector<OracleHit> oracle_top_k(const std::vector<std::pair<std::string, index::Vector>>& corpus,
                                    const index::Vector& query, std::size_t k)
{
    std::vector<OracleHit> all;
    for (const auto& [id, v] : corpus) all.push_back({id, oracle_cosine(query.values(), v.values())});
    sort_hits(all);
    if (all.size() > k) all.resize(k);
    return all;
}

std::vector<int> oracle_quota(const std::vector<knowledge::WeightedKeyword>& keywords, int total)
{
    long long sum = 0;
    for (const auto& k : keywords) sum += k.weight;
    std::vector<int> n(keywords.size(), 0);
    std::vector<long long> rem(keywords.size(), 0);
    int handed = 0;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        long long share = static_cast<long long>(keywords[i].weight) * total;
        while (share >= sum) { // floor by repeated subtraction
            share -= sum;
            ++n[i];
        }
        rem[i] = share;
        handed += n[i];
    }
    std::vector<bool> bumped(keywords.size(), false);
    for (int seat = handed; seat < total; ++seat) {
        std::size_t pick = keywords.size();
        for (std::size_t i = 0; i < keywords.size(); ++i) {
            if (bumped[i]) continue;
            if (pick == keywords.size()) {
                pick = i;
                continue;
            }
            bool better = rem[i] > rem[pick] ||
                          (rem[i] == rem[pick] && (keywords[i].weight > keywords[pick].weight ||
                                                   (keywords[i].weight == keywords[pick].weight &&
                                                    keywords[i].text < keywords[pick].text)));
            if (better) pick = i;
        }
        bumped[pick] = true;
        ++n[pick];
    }
    return n;
}

int oracle_bucket(long long count)
{
    if (count == 0) return 0;
    if (count >= 1 && count <= 10) return 1;
    if (count >= 11 && count <= 100) return 2;
    if (count >= 101 && count <= 1000) return 3;
    return 4;
}

std::string oracle_solution(const index::Embedder& embedder, const std::vector<solution::SolutionDocument>& docs,
                            const std::string& query)
{
    const auto q = embedder.embed(query);
    std::vector<OracleHit> entries;
    for (const auto& d : docs) {
        entries.push_back({d.task_type + "\x1f" "label", oracle_cosine(q.values(), embedder.embed(d.task_type).values())});
        entries.push_back({d.task_type + "\x1f" "text",
                           oracle_cosine(q.values(), embedder.embed(d.task_type + " — " + d.guidance).values())});
    }
    sort_hits(entries);
    const auto& id = entries.front().id;
    return id.substr(0, id.find('\x1f'));
}

namespace {

std::vector<OracleHit> oracle_chunk_scores(const knowledge::KnowledgeStore& store, const index::Embedder& embedder,
                                           const std::string& query_text, int n, knowledge::RetrievalMode mode)
{
    using knowledge::RetrievalMode;
    const auto q = embedder.embed(query_text);
    std::map<std::string, double> best;
    auto credit = [&](const std::vector<std::string>& chunk_ids, double s) {
        for (const auto& cid : chunk_ids) {
            auto it = best.find(cid);
            if (it == best.end() || s > it->second) best[cid] = s;
        }
    };
    if (mode == RetrievalMode::Naive) {
        for (const auto& c : store.chunks()) credit({c.id}, oracle_cosine(q.values(), embedder.embed(c.text).values()));
    }
    if (mode == RetrievalMode::Local || mode == RetrievalMode::Hybrid) {
        for (const auto& e : store.entities()) {
            auto text = e.description.empty() ? e.name : e.name + ": " + e.description;
            credit(e.chunk_ids, oracle_cosine(q.values(), embedder.embed(text).values()));
        }
    }
    if (mode == RetrievalMode::Global || mode == RetrievalMode::Hybrid) {
        for (const auto& r : store.relations())
            credit(r.chunk_ids,
                   oracle_cosine(q.values(), embedder.embed(r.head + " " + r.keyword + " " + r.tail).values()));
    }
    std::vector<OracleHit> hits;
    for (const auto& [cid, s] : best) hits.push_back({cid, s});
    sort_hits(hits);
    if (hits.size() > static_cast<std::size_t>(n)) hits.resize(static_cast<std::size_t>(n));
    return hits;
}

} // namespace

std::vector<OracleDoc> oracle_dual_retrieve(const knowledge::KnowledgeStore& store, const index::Embedder& embedder,
                                            const std::vector<knowledge::WeightedKeyword>& keywords, int n,
                                            knowledge::RetrievalMode mode, bool global_only)
{
    std::string joined;
    for (const auto& k : keywords) joined += (joined.empty() ? "" : " ") + k.text;

    std::vector<OracleDoc> out;
    std::set<std::string> seen;
    for (const auto& h : oracle_chunk_scores(store, embedder, joined, n, mode)) {
        out.push_back({h.id, h.score, true, ""});
        seen.insert(h.id);
    }
    if (global_only) return out;

    const auto quota = oracle_quota(keywords, n);
    std::vector<OracleDoc> per_keyword;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        if (quota[i] == 0) continue;
        for (const auto& h : oracle_chunk_scores(store, embedder, keywords[i].text, quota[i], mode)) {
            auto it = std::find_if(per_keyword.begin(), per_keyword.end(),
                                   [&](const OracleDoc& d) { return d.chunk_id == h.id; });
            if (it == per_keyword.end())
                per_keyword.push_back({h.id, h.score, false, keywords[i].text});
            else if (h.score > it->score)
                *it = {h.id, h.score, false, keywords[i].text};
        }
    }
    std::stable_sort(per_keyword.begin(), per_keyword.end(), [](const OracleDoc& a, const OracleDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    for (auto& d : per_keyword)
        if (!seen.count(d.chunk_id)) out.push_back(std::move(d));
    return out;
}

} // namespace rsagent::fixtures
