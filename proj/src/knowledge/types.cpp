#include "rsagent/knowledge/types.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

namespace rsagent::knowledge {

using nlohmann::json;

std::string_view to_string(RetrievalMode mode)
{
    switch (mode) {
        case RetrievalMode::Local: return "local";
        case RetrievalMode::Global: return "global";
        case RetrievalMode::Hybrid: return "hybrid";
        case RetrievalMode::Naive: return "naive";
    }
    return "hybrid";
}

RetrievalMode retrieval_mode_from_string(std::string_view s)
{
    auto lower = text::to_lower(text::trim(s));
    if (lower == "local") return RetrievalMode::Local;
    if (lower == "global") return RetrievalMode::Global;
    if (lower == "hybrid") return RetrievalMode::Hybrid;
    if (lower == "naive") return RetrievalMode::Naive;
    throw InputError("unknown retrieval mode: " + std::string(s));
}

void validate(const WeightedKeyword& keyword)
{
    if (text::trim(keyword.text).empty()) throw InputError("keyword is empty");
    if (keyword.weight < 1 || keyword.weight > 10)
        throw InputError("keyword '" + keyword.text + "' has weight " + std::to_string(keyword.weight) +
                         " outside [1, 10]");
}

json to_json(const KnowledgeChunk& c)
{
    return {{"id", c.id}, {"text", c.text}, {"source_ref", c.source_ref}};
}

json to_json(const Entity& e)
{
    return {{"name", e.name}, {"type", e.type_label}, {"description", e.description}, {"chunk_ids", e.chunk_ids}};
}

json to_json(const Relation& r)
{
    return {{"head", r.head},
            {"relation", r.keyword},
            {"tail", r.tail},
            {"description", r.description},
            {"chunk_ids", r.chunk_ids},
            {"self_loop", r.self_loop}};
}

json to_json(const WeightedKeyword& k)
{
    return {{"keyword", k.text}, {"weight", k.weight}};
}

json to_json(const QuotaAllocation& a)
{
    json per = json::array();
    for (const auto& q : a.per_keyword) per.push_back({{"keyword", q.keyword}, {"weight", q.weight}, {"n", q.n}});
    return {{"total", a.total}, {"per_keyword", per}};
}

json to_json(const KnowledgeGuidance& g)
{
    json docs = json::array();
    for (const auto& d : g.documents) {
        json doc{{"chunk_id", d.chunk_id},
                 {"text", d.text},
                 {"score", d.score},
                 {"path", d.path == RetrievalPath::Global ? "global" : "keyword"}};
        if (d.path == RetrievalPath::Keyword) doc["keyword"] = d.keyword;
        docs.push_back(std::move(doc));
    }
    json kws = json::array();
    for (const auto& k : g.keywords) kws.push_back(to_json(k));
    json out{{"mode", to_string(g.mode)}, {"keywords", kws}, {"documents", docs}};
    out["allocation"] = g.allocation ? to_json(*g.allocation) : json(nullptr);
    return out;
}

KnowledgeChunk chunk_from_json(const json& j)
{
    return {j.at("id").get<std::string>(), j.at("text").get<std::string>(), j.value("source_ref", "")};
}

Entity entity_from_json(const json& j)
{
    return {j.at("name").get<std::string>(), j.value("type", ""), j.value("description", ""),
            j.value("chunk_ids", std::vector<std::string>{})};
}

Relation relation_from_json(const json& j)
{
    Relation r;
    r.head = j.at("head").get<std::string>();
    r.keyword = j.at("relation").get<std::string>();
    r.tail = j.at("tail").get<std::string>();
    r.description = j.value("description", "");
    r.chunk_ids = j.value("chunk_ids", std::vector<std::string>{});
    r.self_loop = j.value("self_loop", r.head == r.tail);
    return r;
}

KnowledgeGuidance guidance_from_json(const json& j)
{
    KnowledgeGuidance g;
    g.mode = retrieval_mode_from_string(j.at("mode").get<std::string>());
    for (const auto& k : j.at("keywords")) g.keywords.push_back({k.at("keyword"), k.at("weight")});
    for (const auto& d : j.at("documents")) {
        GuidanceDocument doc;
        doc.chunk_id = d.at("chunk_id");
        doc.text = d.value("text", "");
        doc.score = d.at("score");
        doc.path = d.at("path") == "global" ? RetrievalPath::Global : RetrievalPath::Keyword;
        doc.keyword = d.value("keyword", "");
        g.documents.push_back(std::move(doc));
    }
    if (j.contains("allocation") && !j["allocation"].is_null()) {
        QuotaAllocation a;
        a.total = j["allocation"].at("total");
        for (const auto& q : j["allocation"].at("per_keyword")) a.per_keyword.push_back({q.at("keyword"), q.at("weight"), q.at("n")});
        g.allocation = std::move(a);
    }
    return g;
}

} // namespace rsagent::knowledge
