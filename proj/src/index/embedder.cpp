#include "rsagent/index/embedder.hpp"

#include "rsagent/error.hpp"
#include "rsagent/llm/wire.hpp"
#include "rsagent/text.hpp"

namespace rsagent::index {

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension)
{
    if (dimension_ == 0) throw ConfigError("embedder dimension must be positive");
}

std::string HashingEmbedder::tag() const
{
    return "hash-bow-v1/" + std::to_string(dimension_);
}

Vector HashingEmbedder::embed(std::string_view input) const
{
    if (text::trim(input).empty()) throw InputError("embed: text is empty");
    const auto tokens = text::tokenize(input);
    if (tokens.empty()) throw InputError("embed: text has no alphanumeric tokens");
    std::vector<float> counts(dimension_, 0.0f);
    for (const auto& tok : tokens) counts[text::fnv1a64(tok) % dimension_] += 1.0f;
    return Vector::normalized(std::move(counts));
}

RemoteEmbedder::RemoteEmbedder(llm::EndpointProfile profile, std::size_t dimension)
    : backend_(std::move(profile)), dimension_(dimension)
{
    if (dimension_ == 0) throw ConfigError("embedder dimension must be positive");
}

Vector RemoteEmbedder::embed(std::string_view input) const
{
    if (text::trim(input).empty()) throw InputError("embed: text is empty");
    auto body = llm::wire::serialize_embedding_request(backend_.profile().model, std::string(input));
    auto raw = backend_.post_json("/v1/embeddings", body);
    auto values = llm::wire::parse_embedding_response(raw);
    if (values.size() != dimension_)
        throw ProtocolError("embedding has dimension " + std::to_string(values.size()) + ", expected " +
                                std::to_string(dimension_),
                            raw);
    return Vector::normalized(std::move(values));
}

} // namespace rsagent::index
