#pragma once

#include "rsagent/index/vector.hpp"

#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace rsagent::index {

struct IndexEntry {
    std::string id;
    Vector vector;
    std::string payload_ref;
};

struct SearchHit {
    std::string id;
    double score = 0.0;

    bool operator==(const SearchHit&) const = default;
};

/// Ranking order shared by every search: score descending, then id ascending.
bool ranks_before(const SearchHit& a, const SearchHit& b);

/// Exact (brute-force) cosine search over unit vectors.
///
/// Readers run concurrently; add/remove take the lock exclusively, so a
/// search never sees a half-applied write.
class FlatIndex {
public:
    explicit FlatIndex(std::size_t dimension, std::string embedder_tag = {});

    FlatIndex(const FlatIndex& other);
    FlatIndex& operator=(const FlatIndex& other);
    FlatIndex(FlatIndex&& other) noexcept;
    FlatIndex& operator=(FlatIndex&& other) noexcept;

    /// Stores a normalized copy of entry.vector. Throws InputError on a
    /// duplicate id, wrong dimension or zero vector.
    void add(IndexEntry entry);
    /// Inserts or replaces.
    void upsert(IndexEntry entry);
    bool remove(const std::string& id);
    void clear();

    /// min(k, size()) best hits. Throws EmptyIndexError on an empty index and
    /// InputError when k == 0 or the query has the wrong dimension.
    std::vector<SearchHit> search(const Vector& query, std::size_t k) const;

    /// Score for every entry, in insertion order.
    std::vector<SearchHit> score_all(const Vector& query) const;

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    bool contains(const std::string& id) const;
    std::string payload_ref(const std::string& id) const;
    std::vector<std::string> ids() const;
    std::size_t dimension() const noexcept { return dimension_; }
    const std::string& embedder_tag() const noexcept { return embedder_tag_; }

    /// Binary layout, all integers and floats little-endian:
    ///   magic "RSVX" | u32 version=1 | u32 dimension | u64 count
    ///   | u32 tag_len | tag bytes
    ///   | count x (u32 id_len | id | u32 payload_len | payload | dimension x f32)
    void save(const std::string& path) const;
    static FlatIndex load(const std::string& path);

private:
    void insert_locked(IndexEntry&& entry);
    void remove_row_locked(std::size_t row);
    std::vector<SearchHit> score_locked(const Vector& query) const;

    std::size_t dimension_;
    std::string embedder_tag_;
    std::vector<std::string> ids_;
    std::vector<std::string> payloads_;
    std::vector<float> data_;   // row-major, dimension_ floats per entry
    std::vector<double> norms_; // |row| in double
    std::unordered_map<std::string, std::size_t> rows_;
    mutable std::shared_mutex mutex_;
};

} // namespace rsagent::index
