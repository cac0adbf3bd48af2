#pragma once

#include "rsagent/index/embedder.hpp"
#include "rsagent/index/flat_index.hpp"
#include "rsagent/knowledge/extractor.hpp"
#include "rsagent/knowledge/types.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace rsagent::knowledge {

struct ChunkInput {
    std::string text;
    std::string source_ref;
};

/// Store totals after an ingest, plus the warnings raised by that batch.
struct IngestSummary {
    std::size_t chunks = 0;
    std::size_t entities = 0;
    std::size_t relations = 0;
    std::vector<std::string> warnings;
};

/// Corpus loader. `path` may be a .jsonl file ({"text", "source_ref"} per
/// line), a plain-text file (paragraphs separated by blank lines) or a
/// directory of .txt/.jsonl files read in name order.
std::vector<ChunkInput> load_knowledge_corpus(const std::string& path);

/// Knowledge database: chunks plus the entity/relation graph extracted from
/// them, each embedded into its own flat index.
class KnowledgeStore {
public:
    explicit KnowledgeStore(std::shared_ptr<const index::Embedder> embedder);

    /// Extracts and stores a batch. Extractor failures leave the chunk in the
    /// store with no extractions and a warning. Throws InputError when the
    /// batch is empty or a text has nothing to embed; nothing is stored then.
    IngestSummary ingest_chunks(const std::vector<ChunkInput>& chunks, const Extractor& extractor);
    IngestSummary ingest_chunks(const std::vector<std::string>& texts, const Extractor& extractor);

    /// Top-`n` chunks for an embedded query. Every entry of the mode's
    /// index(es) that points at a chunk scores it; a chunk keeps its best
    /// score. Throws EmptyIndexError when the store holds no chunks.
    std::vector<ScoredChunk> search_chunks(const index::Vector& query, std::size_t n, RetrievalMode mode) const;

    /// Single concatenated query: keyword texts joined by spaces.
    std::vector<ScoredChunk> retrieve_global(std::span<const WeightedKeyword> keywords, int n,
                                             RetrievalMode mode) const;

    /// Top-n_i per keyword, merged by chunk id keeping the best score.
    std::vector<KeywordHit> retrieve_per_keyword(const QuotaAllocation& allocation, RetrievalMode mode) const;

    /// Global path first, then keyword-path chunks the global path missed.
    /// With `global_only` the keyword path is skipped entirely.
    KnowledgeGuidance dual_retrieve(std::span<const WeightedKeyword> keywords, int n, RetrievalMode mode,
                                    bool global_only = false) const;

    std::optional<KnowledgeChunk> chunk(const std::string& id) const;
    std::vector<KnowledgeChunk> chunks() const;
    std::vector<Entity> entities() const;
    std::vector<Relation> relations() const;
    std::vector<std::string> warnings() const;
    IngestSummary totals() const;

    /// {"entities": [...], "relations": [...]}
    nlohmann::json export_graph() const;

    /// knowledge.json plus chunks.idx, entities.idx and relations.idx.
    void save(const std::string& dir) const;
    void load(const std::string& dir);

    static std::string relation_id(const Relation& r);
    static std::string relation_text(const Relation& r);
    static std::string entity_text(const Entity& e);

private:
    struct State {
        explicit State(const index::Embedder& e)
            : chunk_index(e.dimension(), e.tag()), entity_index(e.dimension(), e.tag()),
              relation_index(e.dimension(), e.tag())
        {}

        std::vector<KnowledgeChunk> chunks;
        std::map<std::string, std::size_t> chunk_rows;
        std::map<std::string, Entity> entities;
        std::map<std::string, Relation> relations; // by relation_id
        std::vector<std::string> warnings;
        std::size_t next_chunk = 1;
        index::FlatIndex chunk_index;
        index::FlatIndex entity_index;
        index::FlatIndex relation_index;
    };

    IngestSummary totals_locked() const;
    void rebuild_indexes(State& state) const;

    std::shared_ptr<const index::Embedder> embedder_;
    State state_;
    mutable std::shared_mutex mutex_;
};

} // namespace rsagent::knowledge
