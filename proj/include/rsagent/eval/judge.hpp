#pragma once

#include "rsagent/agent/prompts.hpp"
#include "rsagent/knowledge/types.hpp"
#include "rsagent/llm/backend.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsagent::eval {

enum class Dimension { Comprehensiveness, Diversity, Empowerment, Overall };
inline constexpr std::array<Dimension, 4> kDimensions{Dimension::Comprehensiveness, Dimension::Diversity,
                                                      Dimension::Empowerment, Dimension::Overall};
std::string_view to_string(Dimension d);

struct JudgePair {
    std::string question;
    std::string answer_a;
    std::string answer_b;

    bool operator==(const JudgePair&) const = default;
};

/// Winner per dimension as presented to the judge: 1 = "Answer 1", 2 = "Answer 2".
struct JudgeVerdict {
    std::array<int, 4> winner{};

    bool operator==(const JudgeVerdict&) const = default;
};

/// Needs one line per dimension naming "Answer 1" or "Answer 2"
/// ("Diversity: Answer 2"); case and markdown emphasis are ignored.
/// Returns nullopt when a dimension is missing or ambiguous.
std::optional<JudgeVerdict> parse_verdict(std::string_view reply);

struct WinRates {
    knowledge::RetrievalMode mode = knowledge::RetrievalMode::Hybrid;
    std::array<int, 4> a_bp{}; // basis points; a_bp[i] + b_bp[i] == 10000
    std::array<int, 4> b_bp{};
    std::size_t judged_pairs = 0;
    std::size_t excluded_pairs = 0;
    std::vector<std::string> log;
};

/// Each pair is judged twice, A first and then B first. Per dimension a
/// pair is worth 1 to the side that wins both orders and 0.5 to each side
/// on a split. A reply that breaks the verdict format is retried once; a
/// second failure excludes the pair. Throws InputError for mismatched or
/// empty input and ProtocolError when no pair could be judged.
WinRates pairwise_judge(std::span<const JudgePair> pairs, llm::ChatBackend& judge,
                        const agent::PromptTemplate& prompt, knowledge::RetrievalMode mode,
                        const llm::GenerationParams& params = {});

/// Builds pairs from parallel lists.
std::vector<JudgePair> make_pairs(std::span<const std::string> questions, std::span<const std::string> answers_a,
                                  std::span<const std::string> answers_b);

/// JSONL {"question", "answer_a", "answer_b"}
std::vector<JudgePair> load_judge_pairs(const std::string& path);
std::vector<JudgePair> parse_judge_pairs(const std::string& jsonl);

/// Mode | Dimension | <a_label> | <b_label>
std::string render_winrate_table(std::span<const WinRates> results, const std::string& a_label = "Baseline",
                                 const std::string& b_label = "RS-Agent");
nlohmann::json to_json(const WinRates& rates);

} // namespace rsagent::eval
