#include "rsagent/index/flat_index.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>

namespace rsagent::index {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'V', 'X'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_str(std::string& out, const std::string& s)
{
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

class Reader {
public:
    Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

    std::uint64_t uint(int width)
    {
        need(width);
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += width;
        return v;
    }

    std::string str()
    {
        auto len = uint(4);
        need(len);
        std::string s = bytes_.substr(pos_, len);
        pos_ += len;
        return s;
    }

    float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(uint(4))); }

    void raw(char* dst, std::size_t n)
    {
        need(n);
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::uint64_t n)
    {
        if (pos_ + n > bytes_.size()) throw InputError("truncated index file " + path_);
    }

    const std::string& bytes_;
    const std::string& path_;
    std::size_t pos_ = 0;
};

double row_norm(std::span<const float> row)
{
    double sq = 0.0;
    for (float v : row) sq += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(sq);
}

} // namespace

bool ranks_before(const SearchHit& a, const SearchHit& b)
{
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
}

FlatIndex::FlatIndex(std::size_t dimension, std::string embedder_tag)
    : dimension_(dimension), embedder_tag_(std::move(embedder_tag))
{
    if (dimension_ == 0) throw InputError("index dimension must be positive");
}

FlatIndex::FlatIndex(const FlatIndex& other)
{
    std::shared_lock lock(other.mutex_);
    dimension_ = other.dimension_;
    embedder_tag_ = other.embedder_tag_;
    ids_ = other.ids_;
    payloads_ = other.payloads_;
    data_ = other.data_;
    norms_ = other.norms_;
    rows_ = other.rows_;
}

FlatIndex& FlatIndex::operator=(const FlatIndex& other)
{
    if (this != &other) {
        FlatIndex copy(other);
        *this = std::move(copy);
    }
    return *this;
}

FlatIndex::FlatIndex(FlatIndex&& other) noexcept
    : dimension_(other.dimension_),
      embedder_tag_(std::move(other.embedder_tag_)),
      ids_(std::move(other.ids_)),
      payloads_(std::move(other.payloads_)),
      data_(std::move(other.data_)),
      norms_(std::move(other.norms_)),
      rows_(std::move(other.rows_))
{}

FlatIndex& FlatIndex::operator=(FlatIndex&& other) noexcept
{
    if (this != &other) {
        std::scoped_lock lock(mutex_, other.mutex_);
        dimension_ = other.dimension_;
        embedder_tag_ = std::move(other.embedder_tag_);
        ids_ = std::move(other.ids_);
        payloads_ = std::move(other.payloads_);
        data_ = std::move(other.data_);
        norms_ = std::move(other.norms_);
        rows_ = std::move(other.rows_);
    }
    return *this;
}

void FlatIndex::insert_locked(IndexEntry&& entry)
{
    if (entry.vector.dimension() != dimension_)
        throw InputError("entry '" + entry.id + "' has dimension " + std::to_string(entry.vector.dimension()) +
                         ", index expects " + std::to_string(dimension_));
    Vector v = entry.vector.is_normalized()
                   ? std::move(entry.vector)
                   : Vector::normalized(std::vector<float>(entry.vector.values().begin(),
                                                           entry.vector.values().end()));
    rows_.emplace(entry.id, ids_.size());
    ids_.push_back(std::move(entry.id));
    payloads_.push_back(std::move(entry.payload_ref));
    data_.insert(data_.end(), v.values().begin(), v.values().end());
    norms_.push_back(row_norm(v.values()));
}

void FlatIndex::remove_row_locked(std::size_t row)
{
    const std::size_t last = ids_.size() - 1;
    rows_.erase(ids_[row]);
    if (row != last) {
        ids_[row] = std::move(ids_[last]);
        payloads_[row] = std::move(payloads_[last]);
        std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(last * dimension_), dimension_,
                    data_.begin() + static_cast<std::ptrdiff_t>(row * dimension_));
        norms_[row] = norms_[last];
        rows_[ids_[row]] = row;
    }
    ids_.pop_back();
    payloads_.pop_back();
    data_.resize(last * dimension_);
    norms_.pop_back();
}

void FlatIndex::add(IndexEntry entry)
{
    if (entry.vector.is_zero()) throw InputError("zero vector for entry '" + entry.id + "'");
    std::unique_lock lock(mutex_);
    if (rows_.contains(entry.id)) throw InputError("duplicate index id '" + entry.id + "'");
    insert_locked(std::move(entry));
}

void FlatIndex::upsert(IndexEntry entry)
{
    if (entry.vector.is_zero()) throw InputError("zero vector for entry '" + entry.id + "'");
    std::unique_lock lock(mutex_);
    if (auto it = rows_.find(entry.id); it != rows_.end()) {
        if (entry.vector.dimension() != dimension_) throw InputError("dimension mismatch for '" + entry.id + "'");
        remove_row_locked(it->second);
    }
    insert_locked(std::move(entry));
}

bool FlatIndex::remove(const std::string& id)
{
    std::unique_lock lock(mutex_);
    auto it = rows_.find(id);
    if (it == rows_.end()) return false;
    remove_row_locked(it->second);
    return true;
}

void FlatIndex::clear()
{
    std::unique_lock lock(mutex_);
    ids_.clear();
    payloads_.clear();
    data_.clear();
    norms_.clear();
    rows_.clear();
}

std::vector<SearchHit> FlatIndex::score_locked(const Vector& query) const
{
    if (query.dimension() != dimension_)
        throw InputError("query has dimension " + std::to_string(query.dimension()) + ", index expects " +
                         std::to_string(dimension_));
    const auto q = query.values();
    const double qn = row_norm(q);
    if (qn == 0.0) throw InputError("query is the zero vector");

    std::vector<SearchHit> hits;
    hits.reserve(ids_.size());
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        const float* row = data_.data() + r * dimension_;
        double dot = 0.0;
        for (std::size_t i = 0; i < dimension_; ++i) dot += static_cast<double>(q[i]) * static_cast<double>(row[i]);
        hits.push_back({ids_[r], std::clamp(dot / (qn * norms_[r]), -1.0, 1.0)});
    }
    return hits;
}

std::vector<SearchHit> FlatIndex::search(const Vector& query, std::size_t k) const
{
    if (k == 0) throw InputError("search: k must be at least 1");
    std::shared_lock lock(mutex_);
    if (ids_.empty()) throw EmptyIndexError();
    auto hits = score_locked(query);
    lock.unlock();
    const auto keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), ranks_before);
    hits.resize(keep);
    return hits;
}

std::vector<SearchHit> FlatIndex::score_all(const Vector& query) const
{
    std::shared_lock lock(mutex_);
    if (ids_.empty()) throw EmptyIndexError();
    return score_locked(query);
}

std::size_t FlatIndex::size() const
{
    std::shared_lock lock(mutex_);
    return ids_.size();
}

bool FlatIndex::contains(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    return rows_.contains(id);
}

std::string FlatIndex::payload_ref(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    auto it = rows_.find(id);
    if (it == rows_.end()) throw InputError("no index entry '" + id + "'");
    return payloads_[it->second];
}

std::vector<std::string> FlatIndex::ids() const
{
    std::shared_lock lock(mutex_);
    return ids_;
}

void FlatIndex::save(const std::string& path) const
{
    std::shared_lock lock(mutex_);
    std::string out(kMagic, sizeof kMagic);
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(dimension_));
    put_u64(out, ids_.size());
    put_str(out, embedder_tag_);
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        put_str(out, ids_[r]);
        put_str(out, payloads_[r]);
        for (std::size_t i = 0; i < dimension_; ++i) put_u32(out, std::bit_cast<std::uint32_t>(data_[r * dimension_ + i]));
    }
    lock.unlock();
    text::write_file(path, out);
}

FlatIndex FlatIndex::load(const std::string& path)
{
    const auto bytes = text::read_file(path);
    Reader in(bytes, path);
    char magic[4];
    in.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw InputError(path + " is not an index file");
    auto version = in.uint(4);
    if (version != kVersion) throw InputError(path + ": unsupported index version " + std::to_string(version));
    auto dimension = static_cast<std::size_t>(in.uint(4));
    auto count = in.uint(8);
    FlatIndex index(dimension, in.str());
    for (std::uint64_t n = 0; n < count; ++n) {
        IndexEntry e;
        e.id = in.str();
        e.payload_ref = in.str();
        std::vector<float> values(dimension);
        for (auto& v : values) v = in.f32();
        e.vector = Vector::raw(std::move(values));
        if (e.vector.is_zero()) throw InputError(path + ": zero vector for '" + e.id + "'");
        if (index.rows_.contains(e.id)) throw InputError(path + ": duplicate id '" + e.id + "'");
        // Stored rows were normalized on insert; keep their bytes as written.
        index.rows_.emplace(e.id, index.ids_.size());
        index.ids_.push_back(std::move(e.id));
        index.payloads_.push_back(std::move(e.payload_ref));
        index.data_.insert(index.data_.end(), e.vector.values().begin(), e.vector.values().end());
        index.norms_.push_back(row_norm(e.vector.values()));
    }
    if (!in.done()) throw InputError(path + ": trailing bytes after index entries");
    return index;
}

} // namespace rsagent::index
