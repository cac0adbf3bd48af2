#include "rsagent/knowledge/knowledge_store.hpp"

#include "rsagent/error.hpp"
#include "rsagent/knowledge/quota.hpp"
#include "rsagent/text.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <unordered_map>

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsagent::knowledge {

namespace {

constexpr char kSep = '\x1f';
constexpr std::string_view kDefaultEntityType = "entity";

std::string chunk_id_for(std::size_t seq)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "chunk-%06zu", seq);
    return buf;
}

void append_unique(std::vector<std::string>& v, const std::string& s)
{
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

void append_phrase(std::string& description, const std::string& phrase)
{
    std::size_t pos = 0;
    while (pos <= description.size()) {
        auto end = description.find("; ", pos);
        if (end == std::string::npos) end = description.size();
        if (description.compare(pos, end - pos, phrase) == 0) return;
        pos = end + 2;
    }
    if (!description.empty()) description += "; ";
    description += phrase;
}

std::vector<ChunkInput> paragraphs(const std::string& body, const std::string& source)
{
    std::vector<ChunkInput> out;
    std::string current;
    auto flush = [&] {
        auto t = text::trim(current);
        if (!t.empty()) out.push_back({std::string(t), source});
        current.clear();
    };
    for (const auto& line : text::split_lines(body)) {
        if (text::trim(line).empty()) {
            flush();
        } else {
            if (!current.empty()) current += '\n';
            current += line;
        }
    }
    flush();
    return out;
}

std::vector<ChunkInput> jsonl_chunks(const std::string& body, const std::string& source)
{
    std::vector<ChunkInput> out;
    int line_no = 0;
    for (const auto& raw : text::split_lines(body)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            auto j = json::parse(line);
            out.push_back({j.at("text").get<std::string>(), j.value("source_ref", source)});
        } catch (const json::exception& e) {
            throw IngestError(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<ChunkInput> load_one(const fs::path& p)
{
    auto body = text::read_file(p.string());
    if (p.extension() == ".jsonl") return jsonl_chunks(body, p.filename().string());
    return paragraphs(body, p.filename().string());
}

} // namespace

std::vector<ChunkInput> load_knowledge_corpus(const std::string& path)
{
    fs::path p(path);
    if (!fs::exists(p)) throw InputError("no such corpus: " + path);
    if (!fs::is_directory(p)) return load_one(p);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && (e.path().extension() == ".txt" || e.path().extension() == ".jsonl"))
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<ChunkInput> out;
    for (const auto& f : files) {
        auto part = load_one(f);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

std::string KnowledgeStore::relation_id(const Relation& r)
{
    return r.head + kSep + r.keyword + kSep + r.tail;
}

std::string KnowledgeStore::relation_text(const Relation& r)
{
    return r.head + " " + r.keyword + " " + r.tail;
}

std::string KnowledgeStore::entity_text(const Entity& e)
{
    return e.description.empty() ? e.name : e.name + ": " + e.description;
}

KnowledgeStore::KnowledgeStore(std::shared_ptr<const index::Embedder> embedder)
    : embedder_(embedder ? std::move(embedder) : throw ConfigError("KnowledgeStore needs an embedder")),
      state_(*embedder_)
{
}

IngestSummary KnowledgeStore::ingest_chunks(const std::vector<std::string>& texts, const Extractor& extractor)
{
    std::vector<ChunkInput> inputs;
    inputs.reserve(texts.size());
    for (const auto& t : texts) inputs.push_back({t, ""});
    return ingest_chunks(inputs, extractor);
}

IngestSummary KnowledgeStore::ingest_chunks(const std::vector<ChunkInput>& chunks, const Extractor& extractor)
{
    if (chunks.empty()) throw InputError("ingest_chunks: no texts");

    // Embedding and extraction happen before the lock; only the merge is exclusive.
    std::vector<index::Vector> chunk_vectors;
    chunk_vectors.reserve(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (text::trim(chunks[i].text).empty()) throw InputError("chunk " + std::to_string(i) + " is empty");
        try {
            chunk_vectors.push_back(embedder_->embed(chunks[i].text));
        } catch (const InputError& e) {
            throw InputError("chunk " + std::to_string(i) + ": " + e.what());
        }
    }

    std::vector<Extraction> extractions(chunks.size());
    std::vector<std::optional<std::string>> failures(chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        try {
            extractions[i] = extractor.extract(chunks[i].text);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    }

    std::vector<std::string> batch_warnings;
    std::unique_lock lock(mutex_);
    State next = state_;
    std::set<std::string> touched_entities;
    std::set<std::string> touched_relations;

    for (std::size_t i = 0; i < chunks.size(); ++i) {
        KnowledgeChunk chunk{chunk_id_for(next.next_chunk++), chunks[i].text, chunks[i].source_ref};
        if (failures[i]) batch_warnings.push_back(chunk.id + ": extractor " + extractor.name() + " failed: " + *failures[i]);
        next.chunk_index.add({chunk.id, chunk_vectors[i], chunk.id});
        next.chunk_rows[chunk.id] = next.chunks.size();

        for (const auto& t : extractions[i].triples) {
            Relation r;
            r.head = t.head;
            r.keyword = t.relation;
            r.tail = t.tail;
            r.self_loop = t.head == t.tail;
            r.description = relation_text(r);
            auto rid = relation_id(r);
            auto [it, inserted] = next.relations.try_emplace(rid, r);
            append_unique(it->second.chunk_ids, chunk.id);
            touched_relations.insert(rid);

            for (const auto& name : {t.head, t.tail}) {
                auto [eit, fresh] = next.entities.try_emplace(name, Entity{name, std::string(kDefaultEntityType), "", {}});
                append_phrase(eit->second.description, r.description);
                append_unique(eit->second.chunk_ids, chunk.id);
                touched_entities.insert(name);
            }
        }
        next.chunks.push_back(std::move(chunk));
    }

    for (const auto& name : touched_entities) {
        const auto& e = next.entities.at(name);
        next.entity_index.upsert({name, embedder_->embed(entity_text(e)), name});
    }
    for (const auto& rid : touched_relations) {
        const auto& r = next.relations.at(rid);
        next.relation_index.upsert({rid, embedder_->embed(relation_text(r)), rid});
    }
    next.warnings.insert(next.warnings.end(), batch_warnings.begin(), batch_warnings.end());

    state_ = std::move(next);
    auto summary = totals_locked();
    summary.warnings = std::move(batch_warnings);
    return summary;
}

std::vector<ScoredChunk> KnowledgeStore::search_chunks(const index::Vector& query, std::size_t n,
                                                       RetrievalMode mode) const
{
    if (n == 0) throw InputError("search_chunks: n must be positive");
    std::shared_lock lock(mutex_);
    if (state_.chunks.empty()) throw EmptyIndexError("knowledge base is empty");

    std::vector<index::SearchHit> ranked;
    if (mode == RetrievalMode::Naive) {
        ranked = state_.chunk_index.search(query, n);
    } else {
        std::unordered_map<std::string, double> best;
        auto spread = [&](const index::FlatIndex& idx, auto chunk_ids_of) {
            if (idx.empty()) return;
            for (const auto& hit : idx.score_all(query))
                for (const auto& cid : chunk_ids_of(hit.id)) {
                    auto [it, fresh] = best.try_emplace(cid, hit.score);
                    if (!fresh && hit.score > it->second) it->second = hit.score;
                }
        };
        if (mode == RetrievalMode::Local || mode == RetrievalMode::Hybrid)
            spread(state_.entity_index, [&](const std::string& id) -> const auto& { return state_.entities.at(id).chunk_ids; });
        if (mode == RetrievalMode::Global || mode == RetrievalMode::Hybrid)
            spread(state_.relation_index, [&](const std::string& id) -> const auto& { return state_.relations.at(id).chunk_ids; });

        ranked.reserve(best.size());
        for (auto& [cid, score] : best) ranked.push_back({cid, score});
        const auto k = std::min(n, ranked.size());
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(k), ranked.end(), index::ranks_before);
        ranked.resize(k);
    }

    std::vector<ScoredChunk> out;
    out.reserve(ranked.size());
    for (auto& h : ranked) out.push_back({std::move(h.id), h.score});
    return out;
}

std::vector<ScoredChunk> KnowledgeStore::retrieve_global(std::span<const WeightedKeyword> keywords, int n,
                                                         RetrievalMode mode) const
{
    if (keywords.empty()) throw InputError("retrieve_global: no keywords");
    if (n < 1) throw InputError("retrieve_global: N must be at least 1");
    std::vector<std::string> parts;
    for (const auto& k : keywords) {
        validate(k);
        parts.push_back(k.text);
    }
    return search_chunks(embedder_->embed(text::join(parts, " ")), static_cast<std::size_t>(n), mode);
}

std::vector<KeywordHit> KnowledgeStore::retrieve_per_keyword(const QuotaAllocation& allocation,
                                                             RetrievalMode mode) const
{
    if (allocation.per_keyword.empty()) throw InputError("retrieve_per_keyword: empty allocation");
    int sum = 0;
    for (const auto& q : allocation.per_keyword) {
        if (q.n < 0) throw InputError("retrieve_per_keyword: negative quota for '" + q.keyword + "'");
        sum += q.n;
    }
    if (sum != allocation.total || allocation.total < 1)
        throw InputError("retrieve_per_keyword: quotas do not sum to N");

    std::vector<KeywordHit> merged;
    std::unordered_map<std::string, std::size_t> at;
    for (const auto& q : allocation.per_keyword) {
        if (q.n == 0) continue;
        for (auto& hit : search_chunks(embedder_->embed(q.keyword), static_cast<std::size_t>(q.n), mode)) {
            auto [it, fresh] = at.try_emplace(hit.chunk_id, merged.size());
            if (fresh)
                merged.push_back({hit.chunk_id, hit.score, q.keyword});
            else if (hit.score > merged[it->second].score)
                merged[it->second] = {hit.chunk_id, hit.score, q.keyword};
        }
    }
    std::sort(merged.begin(), merged.end(), [](const KeywordHit& a, const KeywordHit& b) {
        return index::ranks_before({a.chunk_id, a.score}, {b.chunk_id, b.score});
    });
    return merged;
}

KnowledgeGuidance KnowledgeStore::dual_retrieve(std::span<const WeightedKeyword> keywords, int n,
                                                RetrievalMode mode, bool global_only) const
{
    KnowledgeGuidance g;
    g.mode = mode;
    g.keywords.assign(keywords.begin(), keywords.end());

    auto global = retrieve_global(keywords, n, mode);
    std::set<std::string> seen;
    auto text_of = [&](const std::string& id) {
        auto c = chunk(id);
        return c ? c->text : std::string{};
    };
    for (auto& h : global) {
        seen.insert(h.chunk_id);
        g.documents.push_back({h.chunk_id, text_of(h.chunk_id), h.score, RetrievalPath::Global, ""});
    }
    if (global_only) return g;

    g.allocation = allocate_quota(keywords, n);
    for (auto& h : retrieve_per_keyword(*g.allocation, mode))
        if (seen.insert(h.chunk_id).second)
            g.documents.push_back({h.chunk_id, text_of(h.chunk_id), h.score, RetrievalPath::Keyword, h.keyword});
    return g;
}

std::optional<KnowledgeChunk> KnowledgeStore::chunk(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    auto it = state_.chunk_rows.find(id);
    if (it == state_.chunk_rows.end()) return std::nullopt;
    return state_.chunks[it->second];
}

std::vector<KnowledgeChunk> KnowledgeStore::chunks() const
{
    std::shared_lock lock(mutex_);
    return state_.chunks;
}

std::vector<Entity> KnowledgeStore::entities() const
{
    std::shared_lock lock(mutex_);
    std::vector<Entity> out;
    for (const auto& [_, e] : state_.entities) out.push_back(e);
    return out;
}

std::vector<Relation> KnowledgeStore::relations() const
{
    std::shared_lock lock(mutex_);
    std::vector<Relation> out;
    for (const auto& [_, r] : state_.relations) out.push_back(r);
    return out;
}

std::vector<std::string> KnowledgeStore::warnings() const
{
    std::shared_lock lock(mutex_);
    return state_.warnings;
}

IngestSummary KnowledgeStore::totals() const
{
    std::shared_lock lock(mutex_);
    return totals_locked();
}

IngestSummary KnowledgeStore::totals_locked() const
{
    return {state_.chunks.size(), state_.entities.size(), state_.relations.size(), {}};
}

json KnowledgeStore::export_graph() const
{
    std::shared_lock lock(mutex_);
    json entities = json::array();
    json relations = json::array();
    for (const auto& [_, e] : state_.entities) entities.push_back(to_json(e));
    for (const auto& [_, r] : state_.relations) relations.push_back(to_json(r));
    return {{"entities", entities}, {"relations", relations}};
}

void KnowledgeStore::save(const std::string& dir) const
{
    std::shared_lock lock(mutex_);
    fs::create_directories(dir);
    json doc{{"version", 1}, {"embedder", embedder_->tag()}, {"next_chunk", state_.next_chunk}};
    doc["chunks"] = json::array();
    for (const auto& c : state_.chunks) doc["chunks"].push_back(to_json(c));
    doc["entities"] = json::array();
    for (const auto& [_, e] : state_.entities) doc["entities"].push_back(to_json(e));
    doc["relations"] = json::array();
    for (const auto& [_, r] : state_.relations) doc["relations"].push_back(to_json(r));
    doc["warnings"] = state_.warnings;
    text::write_file((fs::path(dir) / "knowledge.json").string(), doc.dump(1));
    state_.chunk_index.save((fs::path(dir) / "chunks.idx").string());
    state_.entity_index.save((fs::path(dir) / "entities.idx").string());
    state_.relation_index.save((fs::path(dir) / "relations.idx").string());
}

void KnowledgeStore::rebuild_indexes(State& state) const
{
    state.chunk_index = index::FlatIndex(embedder_->dimension(), embedder_->tag());
    state.entity_index = index::FlatIndex(embedder_->dimension(), embedder_->tag());
    state.relation_index = index::FlatIndex(embedder_->dimension(), embedder_->tag());
    for (const auto& c : state.chunks) state.chunk_index.add({c.id, embedder_->embed(c.text), c.id});
    for (const auto& [name, e] : state.entities) state.entity_index.add({name, embedder_->embed(entity_text(e)), name});
    for (const auto& [rid, r] : state.relations) state.relation_index.add({rid, embedder_->embed(relation_text(r)), rid});
}

void KnowledgeStore::load(const std::string& dir)
{
    const fs::path root(dir);
    json doc;
    try {
        doc = json::parse(text::read_file((root / "knowledge.json").string()));
    } catch (const json::exception& e) {
        throw IngestError("knowledge.json: " + std::string(e.what()));
    }

    State next(*embedder_);
    try {
        for (const auto& c : doc.at("chunks")) {
            next.chunk_rows[c.at("id").get<std::string>()] = next.chunks.size();
            next.chunks.push_back(chunk_from_json(c));
        }
        for (const auto& e : doc.at("entities")) {
            auto ent = entity_from_json(e);
            next.entities.emplace(ent.name, std::move(ent));
        }
        for (const auto& r : doc.at("relations")) {
            auto rel = relation_from_json(r);
            next.relations.emplace(relation_id(rel), std::move(rel));
        }
        next.warnings = doc.value("warnings", std::vector<std::string>{});
        next.next_chunk = doc.value("next_chunk", next.chunks.size() + 1);
    } catch (const json::exception& e) {
        throw IngestError("knowledge.json: " + std::string(e.what()));
    }

    bool reuse = doc.value("embedder", "") == embedder_->tag();
    if (reuse) {
        try {
            next.chunk_index = index::FlatIndex::load((root / "chunks.idx").string());
            next.entity_index = index::FlatIndex::load((root / "entities.idx").string());
            next.relation_index = index::FlatIndex::load((root / "relations.idx").string());
            reuse = next.chunk_index.size() == next.chunks.size() &&
                    next.entity_index.size() == next.entities.size() &&
                    next.relation_index.size() == next.relations.size() &&
                    next.chunk_index.embedder_tag() == embedder_->tag();
        } catch (const Error&) {
            reuse = false;
        }
    }
    if (!reuse) rebuild_indexes(next);

    std::unique_lock lock(mutex_);
    state_ = std::move(next);
}

} // namespace rsagent::knowledge
