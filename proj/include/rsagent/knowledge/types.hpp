#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsagent::knowledge {

struct KnowledgeChunk {
    std::string id;
    std::string text;
    std::string source_ref;

    bool operator==(const KnowledgeChunk&) const = default;
};

struct Entity {
    std::string name;
    std::string type_label;
    std::string description;
    std::vector<std::string> chunk_ids;

    bool operator==(const Entity&) const = default;
};

struct Relation {
    std::string head;
    std::string keyword; // relation label, e.g. "manufactured_by"
    std::string tail;
    std::string description;
    std::vector<std::string> chunk_ids;
    bool self_loop = false;

    bool operator==(const Relation&) const = default;
};

/// A query keyword and its integer importance in [1, 10].
struct WeightedKeyword {
    std::string text;
    int weight = 1;

    bool operator==(const WeightedKeyword&) const = default;
};

struct KeywordQuota {
    std::string keyword;
    int weight = 1;
    int n = 0;

    bool operator==(const KeywordQuota&) const = default;
};

/// Per-keyword document counts; the n values always sum to total.
struct QuotaAllocation {
    std::vector<KeywordQuota> per_keyword; // same order as the input keywords
    int total = 0;

    bool operator==(const QuotaAllocation&) const = default;
};

/// Which vector space(s) a query is matched against.
///   local  - entity index, expanded to the entities' source chunks
///   global - relation index, expanded to the relations' source chunks
///   hybrid - both, merged before the top-k cut
///   naive  - chunk index directly
enum class RetrievalMode { Local, Global, Hybrid, Naive };

std::string_view to_string(RetrievalMode mode);
RetrievalMode retrieval_mode_from_string(std::string_view s);

struct ScoredChunk {
    std::string chunk_id;
    double score = 0.0;

    bool operator==(const ScoredChunk&) const = default;
};

struct KeywordHit {
    std::string chunk_id;
    double score = 0.0;
    std::string keyword; // the keyword whose search scored best

    bool operator==(const KeywordHit&) const = default;
};

enum class RetrievalPath { Global, Keyword };

struct GuidanceDocument {
    std::string chunk_id;
    std::string text;
    double score = 0.0;
    RetrievalPath path = RetrievalPath::Global;
    std::string keyword; // set for keyword-path documents

    bool operator==(const GuidanceDocument&) const = default;
};

/// Deduplicated union of both retrieval paths: global-path documents first,
/// then keyword-path documents, each part in ranking order.
struct KnowledgeGuidance {
    std::vector<GuidanceDocument> documents;
    RetrievalMode mode = RetrievalMode::Hybrid;
    std::vector<WeightedKeyword> keywords;
    std::optional<QuotaAllocation> allocation; // absent in global-only mode

    bool operator==(const KnowledgeGuidance&) const = default;
};

nlohmann::json to_json(const KnowledgeChunk& c);
nlohmann::json to_json(const Entity& e);
nlohmann::json to_json(const Relation& r);
nlohmann::json to_json(const WeightedKeyword& k);
nlohmann::json to_json(const QuotaAllocation& a);
nlohmann::json to_json(const KnowledgeGuidance& g);

KnowledgeChunk chunk_from_json(const nlohmann::json& j);
Entity entity_from_json(const nlohmann::json& j);
Relation relation_from_json(const nlohmann::json& j);
KnowledgeGuidance guidance_from_json(const nlohmann::json& j);

/// Throws InputError unless the keyword is non-blank and 1 <= weight <= 10.
void validate(const WeightedKeyword& keyword);

} // namespace rsagent::knowledge
