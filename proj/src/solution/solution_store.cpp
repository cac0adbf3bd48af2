#include "rsagent/solution/solution_store.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"
#include "rsagent/tools/registry.hpp"

#include <filesystem>
#include <mutex>
#include <set>

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsagent::solution {

namespace {

// Unit separator sorts below every printable byte, so entry ids order the
// same way as the task types they belong to.
constexpr char kSep = '\x1f';

} // namespace

json to_json(const SolutionDocument& doc)
{
    return {{"task_type", doc.task_type},
            {"guidance", doc.guidance},
            {"tools", doc.tools},
            {"input_notes", doc.input_notes}};
}

SolutionDocument solution_from_json(const json& j)
{
    SolutionDocument doc;
    doc.task_type = j.at("task_type").get<std::string>();
    doc.guidance = j.at("guidance").get<std::string>();
    doc.tools = j.at("tools").get<std::vector<std::string>>();
    doc.input_notes = j.value("input_notes", "");
    return doc;
}

std::vector<SolutionDocument> parse_solution_corpus(const std::string& jsonl)
{
    std::vector<SolutionDocument> docs;
    int line_no = 0;
    for (const auto& raw : text::split_lines(jsonl)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            docs.push_back(solution_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw IngestError("solution corpus line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return docs;
}

std::vector<SolutionDocument> load_solution_corpus(const std::string& path)
{
    return parse_solution_corpus(text::read_file(path));
}

std::string embedding_text(const SolutionDocument& doc)
{
    return doc.task_type + " — " + doc.guidance;
}

std::string SolutionStore::label_entry_id(const std::string& task_type)
{
    return task_type + kSep + "label";
}

std::string SolutionStore::text_entry_id(const std::string& task_type)
{
    return task_type + kSep + "text";
}

SolutionStore::SolutionStore(std::shared_ptr<const index::Embedder> embedder)
    : embedder_(std::move(embedder)),
      index_(embedder_ ? embedder_->dimension() : 1, embedder_ ? embedder_->tag() : "")
{
    if (!embedder_) throw ConfigError("solution store needs an embedder");
}

std::size_t SolutionStore::ingest_solutions(const std::vector<SolutionDocument>& docs,
                                            const tools::ToolRegistry& registry)
{
    if (docs.empty()) throw InputError("ingest_solutions: no documents");

    std::set<std::string> seen;
    for (const auto& d : docs) {
        if (text::trim(d.task_type).empty()) throw IngestError("solution with an empty task_type");
        if (d.task_type.find(kSep) != std::string::npos) throw IngestError("task_type contains a control byte");
        if (!seen.insert(d.task_type).second) throw IngestError("duplicate task_type: " + d.task_type);
        if (d.tools.empty()) throw IngestError(d.task_type + ": solution lists no tools");
        for (const auto& t : d.tools)
            if (!registry.contains(t)) throw IngestError(d.task_type + ": unknown tool '" + t + "'");
    }

    std::vector<index::IndexEntry> entries;
    entries.reserve(docs.size() * 2);
    for (const auto& d : docs) {
        entries.push_back({label_entry_id(d.task_type), embedder_->embed(d.task_type), d.task_type});
        entries.push_back({text_entry_id(d.task_type), embedder_->embed(embedding_text(d)), d.task_type});
    }

    std::unique_lock lock(mutex_);
    for (auto& e : entries) index_.upsert(std::move(e));
    for (const auto& d : docs) docs_[d.task_type] = d;
    return docs.size();
}

SolutionGuidance SolutionStore::retrieve_solution(const std::string& task_type) const
{
    if (text::trim(task_type).empty()) throw InputError("retrieve_solution: task type is empty");
    auto query = embedder_->embed(task_type);
    std::shared_lock lock(mutex_);
    if (docs_.empty()) throw EmptyIndexError("solution database is empty");
    auto hits = index_.search(query, 1);
    const auto& best = hits.front();
    return {docs_.at(index_.payload_ref(best.id)), best.score, task_type};
}

std::vector<std::string> SolutionStore::list_task_types() const
{
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    out.reserve(docs_.size());
    for (const auto& [label, _] : docs_) out.push_back(label); // std::map keeps them sorted
    return out;
}

std::vector<SolutionDocument> SolutionStore::documents() const
{
    std::shared_lock lock(mutex_);
    std::vector<SolutionDocument> out;
    for (const auto& [_, d] : docs_) out.push_back(d);
    return out;
}

std::size_t SolutionStore::size() const
{
    std::shared_lock lock(mutex_);
    return docs_.size();
}

void SolutionStore::save(const std::string& dir) const
{
    std::shared_lock lock(mutex_);
    std::string jsonl;
    for (const auto& [_, d] : docs_) jsonl += to_json(d).dump() + "\n";
    text::write_file((fs::path(dir) / "solutions.jsonl").string(), jsonl);
    index_.save((fs::path(dir) / "solutions.idx").string());
}

void SolutionStore::load(const std::string& dir)
{
    auto docs = load_solution_corpus((fs::path(dir) / "solutions.jsonl").string());
    auto idx_path = (fs::path(dir) / "solutions.idx").string();
    std::optional<index::FlatIndex> stored;
    if (fs::exists(idx_path)) {
        auto loaded = index::FlatIndex::load(idx_path);
        if (loaded.embedder_tag() == embedder_->tag() && loaded.dimension() == embedder_->dimension() &&
            loaded.size() == docs.size() * 2)
            stored = std::move(loaded);
    }
    if (!stored) {
        stored.emplace(embedder_->dimension(), embedder_->tag());
        for (const auto& d : docs) {
            stored->add({label_entry_id(d.task_type), embedder_->embed(d.task_type), d.task_type});
            stored->add({text_entry_id(d.task_type), embedder_->embed(embedding_text(d)), d.task_type});
        }
    }
    std::unique_lock lock(mutex_);
    index_ = std::move(*stored);
    docs_.clear();
    for (auto& d : docs) docs_[d.task_type] = std::move(d);
}

} // namespace rsagent::solution
