#include "support.hpp"

#include "rsagent/error.hpp"
#include "rsagent/index/embedder.hpp"
#include "rsagent/index/flat_index.hpp"
#include "rsagent/index/vector.hpp"
#include "rsagent/text.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

using namespace rsagent;
using namespace rsagent::index;
namespace fx = rsagent::fixtures;

namespace {

Vector unit(std::vector<float> v)
{
    return Vector::normalized(std::move(v));
}

// Hand-rolled reference for the hashing embedder.
std::vector<float> reference_bow(const std::string& s, std::size_t dim)
{
    std::vector<double> counts(dim, 0.0);
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        std::uint64_t h = 14695981039346656037ULL;
        for (unsigned char c : tok) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        counts[h % dim] += 1.0;
        tok.clear();
    };
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) && static_cast<unsigned char>(c) < 128)
            tok += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            flush();
    }
    flush();
    double n = 0.0;
    for (double c : counts) n += c * c;
    n = std::sqrt(n);
    std::vector<float> out;
    for (double c : counts) out.push_back(static_cast<float>(c / n));
    return out;
}

} // namespace

TEST(Vector, NormalizationAndValidation)
{
    auto v = unit({3.0f, 4.0f});
    EXPECT_TRUE(v.is_normalized());
    EXPECT_FLOAT_EQ(v.values()[0], 0.6f);
    EXPECT_NEAR(v.norm(), 1.0, 1e-7);
    EXPECT_THROW(Vector::normalized({}), InputError);
    EXPECT_THROW(Vector::normalized({0.0f, 0.0f}), InputError);
    EXPECT_THROW(Vector::normalized({NAN, 1.0f}), InputError);
    EXPECT_FALSE(Vector::raw({1.0f, 1.0f}).is_normalized());
}

TEST(Vector, CosineMatchesDefinition)
{
    EXPECT_DOUBLE_EQ(cosine_similarity(unit({1, 0}), unit({0, 1})), 0.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(unit({1, 1}), unit({2, 2})), 1.0);
    EXPECT_NEAR(cosine_similarity(Vector::raw({1, 2, 3}), Vector::raw({4, 5, 6})), 32.0 / std::sqrt(14.0 * 77.0), 1e-12);
    EXPECT_THROW(cosine_similarity(unit({1, 0}), unit({1, 0, 0})), InputError);
    EXPECT_THROW(cosine_similarity(Vector::raw({0, 0}), unit({1, 0})), InputError);
}

TEST(HashingEmbedder, MatchesReferenceImplementation)
{
    HashingEmbedder e(64);
    for (const std::string s : {"Remove the clouds in this image.", "Boeing 747 manufactured_by Boeing",
                                "SAR  sar SAR!", "F/A-18 Super Hornet"}) {
        auto v = e.embed(s);
        auto ref = reference_bow(s, 64);
        ASSERT_EQ(v.dimension(), 64u);
        for (std::size_t i = 0; i < 64; ++i) EXPECT_FLOAT_EQ(v.values()[i], ref[i]) << s;
        EXPECT_TRUE(v.is_normalized());
    }
    EXPECT_EQ(e.tag(), "hash-bow-v1/64");
}

TEST(HashingEmbedder, DeterministicAndCaseInsensitive)
{
    HashingEmbedder e;
    EXPECT_EQ(e.embed("Cloud Removal"), e.embed("cloud   removal"));
    EXPECT_EQ(e.embed("cloud removal"), e.embed("removal cloud"));
    EXPECT_NEAR(cosine_similarity(e.embed("Cloud Removal"), e.embed("cloud removal")), 1.0, 1e-12);
    EXPECT_THROW(e.embed("   "), InputError);
    EXPECT_THROW(e.embed("—→"), InputError);
}

TEST(FlatIndex, SearchRanksByScoreThenId)
{
    FlatIndex idx(2);
    idx.add({"b", unit({1, 0}), ""});
    idx.add({"a", unit({1, 0}), ""});
    idx.add({"c", unit({0, 1}), ""});
    idx.add({"d", unit({1, 1}), ""});
    auto hits = idx.search(unit({1, 0}), 3);
    ASSERT_EQ(hits.size(), 3u);
    EXPECT_EQ(hits[0].id, "a");
    EXPECT_EQ(hits[1].id, "b");
    EXPECT_EQ(hits[2].id, "d");
    EXPECT_EQ(idx.search(unit({1, 0}), 100).size(), 4u);
}

TEST(FlatIndex, Errors)
{
    FlatIndex idx(2);
    EXPECT_THROW(idx.search(unit({1, 0}), 1), EmptyIndexError);
    idx.add({"a", unit({1, 0}), ""});
    EXPECT_THROW(idx.add({"a", unit({0, 1}), ""}), InputError);
    EXPECT_THROW(idx.add({"b", unit({1, 0, 0}), ""}), InputError);
    EXPECT_THROW(idx.add({"z", Vector::raw({0, 0}), ""}), InputError);
    EXPECT_THROW(idx.search(unit({1, 0}), 0), InputError);
    EXPECT_THROW(idx.search(unit({1, 0, 0}), 1), InputError);
}

TEST(FlatIndex, UpsertRemoveAndPayloads)
{
    FlatIndex idx(2);
    idx.add({"a", unit({1, 0}), "pa"});
    idx.add({"b", unit({0, 1}), "pb"});
    idx.upsert({"a", unit({0, 1}), "pa2"});
    EXPECT_EQ(idx.size(), 2u);
    EXPECT_EQ(idx.payload_ref("a"), "pa2");
    EXPECT_NEAR(idx.search(unit({0, 1}), 1)[0].score, 1.0, 1e-12);
    EXPECT_TRUE(idx.remove("b"));
    EXPECT_FALSE(idx.remove("b"));
    EXPECT_EQ(idx.ids(), std::vector<std::string>{"a"});
    idx.add({"b", unit({1, 0}), "pb"});
    EXPECT_EQ(idx.search(unit({1, 0}), 1)[0].id, "b");
}

TEST(FlatIndex, RawVectorsAreNormalizedOnInsert)
{
    FlatIndex idx(2);
    idx.add({"a", Vector::raw({10, 0}), ""});
    EXPECT_NEAR(idx.search(unit({1, 0}), 1)[0].score, 1.0, 1e-12);
}

TEST(FlatIndex, MatchesBruteForceOnRandomCorpora)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = 1 + rng() % 6;
        const std::size_t n = 1 + rng() % 300;
        FlatIndex idx(dim);
        std::vector<std::pair<std::string, Vector>> corpus;
        std::uniform_int_distribution<int> small(-2, 2); // coarse values force score ties
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<float> v(dim);
            do {
                for (auto& x : v) x = static_cast<float>(small(rng));
            } while (std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; }));
            auto id = "e" + std::to_string(rng() % 100000) + "-" + std::to_string(i);
            corpus.emplace_back(id, unit(v));
            idx.add({id, corpus.back().second, ""});
        }
        std::vector<float> q(dim);
        do {
            for (auto& x : q) x = static_cast<float>(small(rng));
        } while (std::all_of(q.begin(), q.end(), [](float x) { return x == 0.0f; }));
        const std::size_t k = 1 + rng() % (n + 5);
        auto got = idx.search(unit(q), k);
        auto want = fx::oracle_top_k(corpus, unit(q), k);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            ASSERT_EQ(got[i].id, want[i].id) << "trial " << trial << " rank " << i;
            ASSERT_EQ(got[i].score, want[i].score);
        }
    }
}

TEST(FlatIndex, SaveLoadRoundTrip)
{
    fx::TempDir dir;
    HashingEmbedder e(32);
    FlatIndex idx(32, e.tag());
    idx.add({"x", e.embed("cloud removal"), "doc-x"});
    idx.add({"y", e.embed("road extraction"), "doc-y"});
    const auto path = (dir.path() / "t.idx").string();
    idx.save(path);
    auto loaded = FlatIndex::load(path);
    EXPECT_EQ(loaded.size(), 2u);
    EXPECT_EQ(loaded.embedder_tag(), e.tag());
    EXPECT_EQ(loaded.payload_ref("y"), "doc-y");
    auto q = e.embed("remove clouds");
    EXPECT_EQ(loaded.search(q, 2), idx.search(q, 2));

    text::write_file(path, "RSVX garbage");
    EXPECT_ANY_THROW(FlatIndex::load(path));
}

TEST(FlatIndex, ConcurrentReadersSeeCompleteWrites)
{
    FlatIndex idx(2);
    idx.add({"seed", unit({1, 0}), ""});
    std::atomic<bool> stop{false};
    std::atomic<int> bad{0};
    std::thread writer([&] {
        for (int i = 0; i < 2000; ++i) idx.upsert({"k" + std::to_string(i % 50), unit({1, float(i % 7)}), ""});
        stop = true;
    });
    std::vector<std::thread> readers;
    for (int r = 0; r < 3; ++r)
        readers.emplace_back([&] {
            while (!stop) {
                auto hits = idx.search(unit({1, 0}), 5);
                for (std::size_t i = 1; i < hits.size(); ++i)
                    if (!ranks_before(hits[i - 1], hits[i])) ++bad;
            }
        });
    writer.join();
    for (auto& t : readers) t.join();
    EXPECT_EQ(bad.load(), 0);
    EXPECT_EQ(idx.size(), 51u);
}
