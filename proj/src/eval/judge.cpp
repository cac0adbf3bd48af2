#include "rsagent/eval/judge.hpp"

#include "rsagent/error.hpp"
#include "rsagent/eval/format.hpp"
#include "rsagent/text.hpp"

namespace rsagent::eval {

using nlohmann::json;

std::string_view to_string(Dimension d)
{
    switch (d) {
        case Dimension::Comprehensiveness: return "Comprehensiveness";
        case Dimension::Diversity: return "Diversity";
        case Dimension::Empowerment: return "Empowerment";
        case Dimension::Overall: return "Overall";
    }
    return "Overall";
}

std::optional<JudgeVerdict> parse_verdict(std::string_view reply)
{
    JudgeVerdict v;
    for (std::size_t i = 0; i < kDimensions.size(); ++i) {
        const auto name = text::to_lower(to_string(kDimensions[i]));
        int found = 0;
        for (const auto& raw : text::split_lines(reply)) {
            auto line = text::to_lower(raw);
            auto pos = line.find(name);
            if (pos == std::string::npos) continue;
            auto rest = line.substr(pos + name.size());
            const bool one = rest.find("answer 1") != std::string::npos;
            const bool two = rest.find("answer 2") != std::string::npos;
            if (one == two) continue;
            const int w = one ? 1 : 2;
            if (found && found != w) return std::nullopt;
            found = w;
        }
        if (!found) return std::nullopt;
        v.winner[i] = found;
    }
    return v;
}

std::vector<JudgePair> make_pairs(std::span<const std::string> questions, std::span<const std::string> answers_a,
                                  std::span<const std::string> answers_b)
{
    if (questions.size() != answers_a.size() || questions.size() != answers_b.size())
        throw InputError("pairwise_judge: questions and answers differ in length");
    std::vector<JudgePair> out;
    for (std::size_t i = 0; i < questions.size(); ++i) out.push_back({questions[i], answers_a[i], answers_b[i]});
    return out;
}

WinRates pairwise_judge(std::span<const JudgePair> pairs, llm::ChatBackend& judge, const agent::PromptTemplate& prompt,
                        knowledge::RetrievalMode mode, const llm::GenerationParams& params)
{
    if (pairs.empty()) throw InputError("pairwise_judge: no pairs");
    WinRates out;
    out.mode = mode;
    std::array<long long, 4> a_half{}; // A's score in half-wins

    auto ask = [&](const std::string& q, const std::string& first, const std::string& second) {
        agent::PromptValues values{{"question", q}, {"answer 1", first}, {"answer 2", second}};
        std::vector<llm::ChatMessage> messages{llm::ChatMessage::system(agent::render(prompt.system, values)),
                                               llm::ChatMessage::user(agent::render(prompt.user, values))};
        for (int attempt = 0; attempt < 2; ++attempt)
            if (auto v = parse_verdict(llm::complete_chat(messages, params, judge).content)) return v;
        return std::optional<JudgeVerdict>{};
    };

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& p = pairs[i];
        auto forward = ask(p.question, p.answer_a, p.answer_b);
        auto swapped = forward ? ask(p.question, p.answer_b, p.answer_a) : std::nullopt;
        if (!forward || !swapped) {
            ++out.excluded_pairs;
            out.log.push_back("pair " + std::to_string(i) + " excluded: judge reply missing a dimension verdict twice");
            continue;
        }
        ++out.judged_pairs;
        for (std::size_t d = 0; d < kDimensions.size(); ++d)
            a_half[d] += (forward->winner[d] == 1 ? 1 : 0) + (swapped->winner[d] == 2 ? 1 : 0);
    }
    if (out.judged_pairs == 0) throw ProtocolError("pairwise_judge: no pair could be judged", "");

    const long long denom = 2LL * static_cast<long long>(out.judged_pairs);
    for (std::size_t d = 0; d < kDimensions.size(); ++d) {
        // round half up to the nearest basis point
        out.a_bp[d] = static_cast<int>((a_half[d] * 20000 + denom) / (2 * denom));
        out.b_bp[d] = 10000 - out.a_bp[d];
    }
    return out;
}

std::vector<JudgePair> parse_judge_pairs(const std::string& jsonl)
{
    std::vector<JudgePair> out;
    int line_no = 0;
    for (const auto& raw : text::split_lines(jsonl)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            auto j = json::parse(line);
            out.push_back({j.at("question"), j.at("answer_a"), j.at("answer_b")});
        } catch (const json::exception& e) {
            throw InputError("judge pairs line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<JudgePair> load_judge_pairs(const std::string& path)
{
    return parse_judge_pairs(text::read_file(path));
}

std::string render_winrate_table(std::span<const WinRates> results, const std::string& a_label,
                                 const std::string& b_label)
{
    std::vector<std::vector<std::string>> rows{{"Mode", "Dimension", a_label, b_label}};
    for (const auto& r : results) {
        std::string mode(knowledge::to_string(r.mode));
        if (!mode.empty()) mode[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(mode[0])));
        for (std::size_t d = 0; d < kDimensions.size(); ++d)
            rows.push_back({d == 0 ? mode : "", std::string(to_string(kDimensions[d])), format_basis_points(r.a_bp[d]),
                            format_basis_points(r.b_bp[d])});
    }
    return render_table(rows);
}

json to_json(const WinRates& rates)
{
    json dims = json::object();
    for (std::size_t d = 0; d < kDimensions.size(); ++d)
        dims[std::string(to_string(kDimensions[d]))] = {{"a_bp", rates.a_bp[d]},
                                                         {"b_bp", rates.b_bp[d]},
                                                         {"a", format_basis_points(rates.a_bp[d])},
                                                         {"b", format_basis_points(rates.b_bp[d])}};
    return {{"mode", knowledge::to_string(rates.mode)},
            {"dimensions", dims},
            {"judged_pairs", rates.judged_pairs},
            {"excluded_pairs", rates.excluded_pairs},
            {"log", rates.log}};
}

} // namespace rsagent::eval
