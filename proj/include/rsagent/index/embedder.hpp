#pragma once

#include "rsagent/index/vector.hpp"
#include "rsagent/llm/openai_backend.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace rsagent::index {

/// Text -> unit vector. Implementations are deterministic and thread-safe.
class Embedder {
public:
    virtual ~Embedder() = default;

    /// Throws InputError when `text` is blank after trimming.
    virtual Vector embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
    /// Identifies the embedding space; stored in index files.
    virtual std::string tag() const = 0;
};

/// Offline reference embedder: token-hash bag of words.
///
///   tokens  = maximal runs of ASCII [A-Za-z0-9], lowercased
///   bucket  = FNV-1a-64(token bytes) mod dimension
///   v[b]   += 1 for every token occurrence
///   result  = v / |v|_2, stored as float32
///
/// Text without any token raises InputError (it would be the zero vector).
class HashingEmbedder final : public Embedder {
public:
    static constexpr std::size_t kDefaultDimension = 256;

    explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

    Vector embed(std::string_view text) const override;
    std::size_t dimension() const override { return dimension_; }
    std::string tag() const override;

private:
    std::size_t dimension_;
};

/// Embeddings from an OpenAI-compatible /v1/embeddings endpoint.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(llm::EndpointProfile profile, std::size_t dimension);

    Vector embed(std::string_view text) const override;
    std::size_t dimension() const override { return dimension_; }
    std::string tag() const override { return "remote:" + backend_.profile().model; }

private:
    llm::OpenAiBackend backend_;
    std::size_t dimension_;
};

} // namespace rsagent::index
