#pragma once

#include "rsagent/llm/backend.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace rsagent::knowledge {

struct ExtractedTriple {
    std::string head;
    std::string relation;
    std::string tail;

    bool operator==(const ExtractedTriple&) const = default;
};

struct Extraction {
    std::vector<ExtractedTriple> triples;
};

/// Parses triple lines of the form
///   HEAD —relation→ TAIL     (em dash + arrow)
///   HEAD -relation-> TAIL    (ASCII spelling)
/// Other lines are ignored. Names and relation labels are trimmed; lines
/// with an empty part are skipped.
Extraction parse_triple_lines(std::string_view text);

/// Turns a chunk of text into entity/relation triples. May throw; the store
/// records a warning and keeps the chunk when it does.
class Extractor {
public:
    virtual ~Extractor() = default;
    virtual Extraction extract(std::string_view chunk_text) const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic extractor that reads explicit triple lines from the chunk.
class MockExtractor final : public Extractor {
public:
    Extraction extract(std::string_view chunk_text) const override { return parse_triple_lines(chunk_text); }
    std::string name() const override { return "mock"; }
};

/// Asks the model to list triples (extract.txt prompt, placeholder {chunk})
/// and parses its reply with parse_triple_lines.
class LlmExtractor final : public Extractor {
public:
    LlmExtractor(std::shared_ptr<llm::ChatBackend> backend, std::string system_prompt, std::string user_template,
                 llm::GenerationParams params = {});

    Extraction extract(std::string_view chunk_text) const override;
    std::string name() const override { return "llm"; }

private:
    std::shared_ptr<llm::ChatBackend> backend_;
    std::string system_prompt_;
    std::string user_template_;
    llm::GenerationParams params_;
};

} // namespace rsagent::knowledge
