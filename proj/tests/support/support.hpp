#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, temporary
// directories, golden files and brute-force reference implementations.
//
// The oracles deliberately avoid the library's ranking and allocation code;
// they only share the embedder, which is tested on its own.

#include "rsagent/agent/trace.hpp"
#include "rsagent/eval/planning.hpp"
#include "rsagent/index/embedder.hpp"
#include "rsagent/index/vector.hpp"
#include "rsagent/knowledge/knowledge_store.hpp"
#include "rsagent/knowledge/types.hpp"
#include "rsagent/service/app.hpp"
#include "rsagent/service/config.hpp"
#include "rsagent/solution/solution_store.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <thread>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

namespace rsagent::fixtures {

std::filesystem::path source_dir();
std::filesystem::path data_path(const std::string& rel);
std::filesystem::path golden_path(const std::string& rel);

/// Removed with its contents on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "rsagent-test");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

/// Scripted model, hashing embedder, mock tools and the data/ corpora.
service::Config offline_config(const std::string& data_dir);

/// The 10 planning cases behind the golden traces.
std::vector<eval::PlanningCase> golden_cases();

/// Runs every golden case in a fresh session.
std::vector<agent::AgentTrace> run_golden_cases(service::App& app);

/// Stable file name for a case: "01-remove-the-clouds-in-this-image.json".
std::string golden_trace_name(std::size_t index, const eval::PlanningCase& c);

/// Compares `actual` with the golden file byte for byte. With
/// RSAGENT_UPDATE_GOLDEN=1 in the environment the file is rewritten
/// instead. Returns a description of the mismatch, if any.
std::optional<std::string> check_golden(const std::string& rel, const std::string& actual);

bool updating_golden();

/// OpenAI-compatible endpoint on an ephemeral local port. Chat requests are
/// answered by `backend` (its replies travel through the real wire format);
/// embeddings come from `embedder` when one is given.
class FakeOpenAiServer {
public:
    explicit FakeOpenAiServer(std::shared_ptr<llm::ChatBackend> backend,
                              std::shared_ptr<const index::Embedder> embedder = nullptr);
    ~FakeOpenAiServer();

    std::string base_url() const;
    /// The next `count` requests get `status` with a short error body.
    void fail_next(int count, int status);
    /// The next request gets `body` verbatim with status 200.
    void reply_raw_once(std::string body);
    int requests() const noexcept { return requests_; }
    const std::string& last_request() const noexcept { return last_request_; }
    const std::string& last_authorization() const noexcept { return last_auth_; }

private:
    std::shared_ptr<llm::ChatBackend> backend_;
    std::shared_ptr<const index::Embedder> embedder_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = -1;
    std::atomic<int> requests_{0};
    std::atomic<int> fail_count_{0};
    int fail_status_ = 500;
    std::string raw_once_;
    std::string last_request_;
    std::string last_auth_;
};

// ---------------------------------------------------------------------------
// Oracles

/// dot / (sqrt(|a|^2) * sqrt(|b|^2)) accumulated in double.
double oracle_cosine(std::span<const float> a, std::span<const float> b);

struct OracleHit {
    std::string id;
    double score = 0.0;
};

/// Full sort of every (id, vector) pair by score descending, then id ascending.
std::vector<OracleHit> oracle_top_k(const std::vector<std::pair<std::string, index::Vector>>& corpus,
                                    const index::Vector& query, std::size_t k);

/// Largest remainder, handing out leftover seats one at a time by linear scan.
std::vector<int> oracle_quota(const std::vector<knowledge::WeightedKeyword>& keywords, int total);

/// 0 / [1,10] / [11,100] / [101,1000] / >1000 by explicit comparisons.
int oracle_bucket(long long count);

/// Best solution document for `query` over both entries of every document.
std::string oracle_solution(const index::Embedder& embedder, const std::vector<solution::SolutionDocument>& docs,
                            const std::string& query);

struct OracleDoc {
    std::string chunk_id;
    double score = 0.0;
    bool global = true;
    std::string keyword;
};

/// Two-path retrieval recomputed from the store's chunks, entities and
/// relations: every entity/relation text is re-embedded and scored here.
std::vector<OracleDoc> oracle_dual_retrieve(const knowledge::KnowledgeStore& store, const index::Embedder& embedder,
                                            const std::vector<knowledge::WeightedKeyword>& keywords, int n,
                                            knowledge::RetrievalMode mode, bool global_only);

} // namespace rsagent::fixtures
