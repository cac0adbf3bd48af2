#pragma once

#include "rsagent/index/embedder.hpp"
#include "rsagent/index/flat_index.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

namespace rsagent::tools {
class ToolRegistry;
}

namespace rsagent::solution {

/// One expert recipe for a task type.
struct SolutionDocument {
    std::string task_type;
    std::string guidance;
    std::vector<std::string> tools; // in the order the recipe uses them
    std::string input_notes;

    bool operator==(const SolutionDocument&) const = default;
};

struct SolutionGuidance {
    SolutionDocument document;
    double score = 0.0;
    std::string query_task_type;
};

nlohmann::json to_json(const SolutionDocument& doc);
SolutionDocument solution_from_json(const nlohmann::json& j);

/// Record-per-line corpus: {"task_type", "guidance", "tools": [...], "input_notes"}.
std::vector<SolutionDocument> load_solution_corpus(const std::string& path);
std::vector<SolutionDocument> parse_solution_corpus(const std::string& jsonl);

/// Text embedded for a document's full-text entry: task_type + " — " + guidance.
std::string embedding_text(const SolutionDocument& doc);

/// Solution database plus top-1 Task-Aware Retrieval.
///
/// Every document gets two index entries: its bare task_type label and the
/// full embedding_text(). A document scores the better of the two, so a
/// query equal to a stored label retrieves that document with score 1.
class SolutionStore {
public:
    explicit SolutionStore(std::shared_ptr<const index::Embedder> embedder);

    /// Validates the whole batch first, then embeds and stores it. Documents
    /// whose task_type already exists replace the stored version.
    ///
    /// Throws InputError for an empty batch and IngestError for duplicate
    /// task types, empty fields or tools the registry cannot resolve.
    std::size_t ingest_solutions(const std::vector<SolutionDocument>& docs, const tools::ToolRegistry& registry);

    /// Best document for the task label. Throws EmptyIndexError when the
    /// database is empty and InputError for a blank label.
    SolutionGuidance retrieve_solution(const std::string& task_type) const;

    /// Sorted, deduplicated labels.
    std::vector<std::string> list_task_types() const;

    std::vector<SolutionDocument> documents() const;
    std::size_t size() const;

    /// Writes solutions.jsonl and solutions.idx into `dir`.
    void save(const std::string& dir) const;
    /// Loads what save() wrote; re-embeds when the stored embedder tag differs.
    void load(const std::string& dir);

    static std::string label_entry_id(const std::string& task_type);
    static std::string text_entry_id(const std::string& task_type);

private:
    std::shared_ptr<const index::Embedder> embedder_;
    index::FlatIndex index_;
    std::map<std::string, SolutionDocument> docs_;
    mutable std::shared_mutex mutex_;
};

} // namespace rsagent::solution
