#include "support.hpp"

#include "rsagent/agent/prompts.hpp"
#include "rsagent/error.hpp"
#include "rsagent/eval/counting.hpp"
#include "rsagent/eval/format.hpp"
#include "rsagent/eval/judge.hpp"
#include "rsagent/eval/planning.hpp"
#include "rsagent/text.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>

using namespace rsagent;
using namespace rsagent::eval;
namespace fx = rsagent::fixtures;

namespace {

/// Judge that reads both answers out of the prompt and applies `prefer`.
/// `prefer` returns 1 or 2 for the answer it favours.
class FakeJudge : public llm::ChatBackend {
public:
    using Prefer = std::function<int(const std::string& first, const std::string& second)>;
    explicit FakeJudge(Prefer prefer) : prefer_(std::move(prefer)) {}

    llm::ChatCompletion complete(std::span<const llm::ChatMessage> messages, const llm::GenerationParams&) override
    {
        ++calls;
        const auto& user = messages.back().content;
        auto a1 = user.find("Answer 1:\n") + 10;
        auto a2 = user.find("\n\nAnswer 2:\n");
        std::string first = user.substr(a1, a2 - a1);
        std::string second = user.substr(a2 + 12);
        while (!second.empty() && second.back() == '\n') second.pop_back();
        if (garble_first_n > 0) {
            --garble_first_n;
            return reply("I cannot decide.");
        }
        int w = prefer_(first, second);
        std::string verdict = "Answer " + std::to_string(w);
        return reply("Comprehensiveness: " + verdict + "\n**Diversity**: " + verdict + "\nempowerment: answer " +
                    std::to_string(w) + "\nOverall: " + verdict);
    }
    std::string name() const override { return "fake-judge"; }

    std::atomic<int> calls{0};
    int garble_first_n = 0;

private:
    static llm::ChatCompletion reply(std::string text)
    {
        llm::ChatCompletion c;
        c.content = std::move(text);
        return c;
    }

    Prefer prefer_;
};

int prefers_good(const std::string& first, const std::string&)
{
    return first.find("good") != std::string::npos ? 1 : 2;
}

/// Independent rounding: percentage of A from half-point units, half up.
int oracle_bp(long long a_halves, long long pairs)
{
    long double pct = static_cast<long double>(a_halves) * 10000.0L / (2.0L * static_cast<long double>(pairs));
    return static_cast<int>(std::floor(pct + 0.5L));
}

agent::AgentTrace trace_with_first_tool(const std::string& tool)
{
    return {{agent::ToolInvoked{tool, {}, tools::ToolOutput{"ok", std::nullopt, {}}, std::nullopt},
             agent::FinalAnswer{"done", std::nullopt}}};
}

} // namespace

// ---------------------------------------------------------------------------
// Counting

TEST(Counting, SingleWorkedRecord)
{
    std::vector<CountingRecord> r{{10, 20}};
    auto m = counting_metrics(r);
    EXPECT_NEAR(m.relative_error, std::log(2.0), 1e-12);
    EXPECT_EQ(m.absolute_accuracy, 0.0);
    EXPECT_EQ(m.interval_accuracy, 0.0);
    EXPECT_EQ(m.n_cases, 1u);
}

TEST(Counting, ZeroGroundTruthUsesUnitDenominator)
{
    EXPECT_NEAR(relative_error_term({0, 3}), std::log(4.0), 1e-12);
    EXPECT_EQ(relative_error_term({0, 0}), 0.0);
    std::vector<CountingRecord> r{{0, 0}, {5, 5}, {1000, 1001}, {1001, 2000}};
    auto m = counting_metrics(r);
    EXPECT_DOUBLE_EQ(m.absolute_accuracy, 0.5);
    EXPECT_DOUBLE_EQ(m.interval_accuracy, 0.75);
}

TEST(Counting, BucketsMatchOracle)
{
    for (long long c : {0LL, 1LL, 10LL, 11LL, 100LL, 101LL, 1000LL, 1001LL, 123456LL})
        EXPECT_EQ(count_bucket(c), fx::oracle_bucket(c)) << c;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> any(0, 5000);
    for (int i = 0; i < 2000; ++i) {
        auto c = any(rng);
        ASSERT_EQ(count_bucket(c), fx::oracle_bucket(c)) << c;
    }
}

TEST(Counting, RandomListsMatchDirectFormula)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long long> val(0, 1500);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<CountingRecord> recs(1 + trial % 17);
        for (auto& r : recs) r = {val(rng), val(rng)};
        long double sum = 0;
        int exact = 0, same = 0;
        for (const auto& r : recs) {
            long double denom = r.gt > 0 ? r.gt : 1;
            sum += std::log1p(static_cast<long double>(std::llabs(r.gt - r.p)) / denom);
            exact += r.gt == r.p;
            same += fx::oracle_bucket(r.gt) == fx::oracle_bucket(r.p);
        }
        auto m = counting_metrics(recs);
        ASSERT_NEAR(m.relative_error, static_cast<double>(sum / recs.size()), 1e-9);
        ASSERT_DOUBLE_EQ(m.absolute_accuracy, static_cast<double>(exact) / recs.size());
        ASSERT_DOUBLE_EQ(m.interval_accuracy, static_cast<double>(same) / recs.size());
        auto shuffled = recs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        ASSERT_EQ(counting_metrics(shuffled).relative_error, m.relative_error);
    }
}

TEST(Counting, RejectsBadInput)
{
    EXPECT_THROW(counting_metrics(std::vector<CountingRecord>{}), InputError);
    EXPECT_THROW(counting_metrics(std::vector<CountingRecord>{{-1, 2}}), InputError);
    EXPECT_THROW(parse_counting_records("{\"gt\": 1}\n"), InputError);
}

TEST(Counting, ParsesJsonlAndCsv)
{
    EXPECT_EQ(parse_counting_records("{\"gt\": 3, \"p\": 4}\n\n{\"gt\": 0, \"p\": 0}\n"),
              (std::vector<CountingRecord>{{3, 4}, {0, 0}}));
    EXPECT_EQ(parse_counting_records("gt,p\n3,4\n10, 20\n"), (std::vector<CountingRecord>{{3, 4}, {10, 20}}));
    auto fixture = load_counting_records(fx::data_path("eval/counting.jsonl").string());
    EXPECT_EQ(fixture.size(), 8u);
    auto table = render_counting_table(counting_metrics(fixture));
    EXPECT_NE(table.find("Relative Error"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Formatting

TEST(Format, PercentCells)
{
    EXPECT_EQ(format_percent(1.0), "100%");
    EXPECT_EQ(format_percent(0.0), "0%");
    EXPECT_EQ(format_percent(0.9568), "95.68%");
    EXPECT_EQ(format_basis_points(5800), "58.00%");
    EXPECT_EQ(format_basis_points(4200), "42.00%");
    EXPECT_EQ(format_basis_points(5), "0.05%");
    auto t = render_table({{"A", "Long header"}, {"xx", "y"}});
    EXPECT_EQ(t, "| A  | Long header |\n|----|-------------|\n| xx | y           |\n");
}

// ---------------------------------------------------------------------------
// Judge

TEST(Judge, VerdictParsing)
{
    auto v = parse_verdict("Comprehensiveness: Answer 1\nDiversity: **Answer 2**\nEmpowerment: answer 1\nOverall: Answer 2");
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(v->winner, (std::array<int, 4>{1, 2, 1, 2}));
    EXPECT_FALSE(parse_verdict("Comprehensiveness: Answer 1\nDiversity: Answer 2\nOverall: Answer 1").has_value());
    EXPECT_FALSE(parse_verdict("Comprehensiveness: Answer 1 or Answer 2\nDiversity: Answer 2\nEmpowerment: Answer 1\nOverall: Answer 1")
                     .has_value());
}

TEST(Judge, ConsistentPreferenceGivesFullWin)
{
    FakeJudge judge(prefers_good);
    std::vector<JudgePair> pairs{{"q1", "bad one", "good one"}, {"q2", "bad two", "good two"}};
    auto r = pairwise_judge(pairs, judge, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Hybrid);
    EXPECT_EQ(r.b_bp, (std::array<int, 4>{10000, 10000, 10000, 10000}));
    EXPECT_EQ(r.a_bp, (std::array<int, 4>{0, 0, 0, 0}));
    EXPECT_EQ(judge.calls.load(), 4);
    EXPECT_EQ(r.judged_pairs, 2u);
}

TEST(Judge, PositionBiasSplitsEvenly)
{
    FakeJudge judge([](const std::string&, const std::string&) { return 1; });
    std::vector<JudgePair> pairs{{"q", "x", "y"}, {"q2", "a", "b"}, {"q3", "c", "d"}};
    auto r = pairwise_judge(pairs, judge, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Local);
    for (int d = 0; d < 4; ++d) {
        EXPECT_EQ(r.a_bp[d], 5000);
        EXPECT_EQ(r.b_bp[d], 5000);
    }
}

TEST(Judge, FiftyEightPercentWorkedExample)
{
    std::vector<JudgePair> pairs;
    for (int i = 0; i < 500; ++i) {
        auto id = std::to_string(i);
        if (i < 290) pairs.push_back({"q" + id, "good " + id, "bad " + id});
        else pairs.push_back({"q" + id, "bad " + id, "good " + id});
    }
    FakeJudge judge(prefers_good);
    auto r = pairwise_judge(pairs, judge, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Global);
    EXPECT_EQ(format_basis_points(r.a_bp[3]), "58.00%");
    EXPECT_EQ(format_basis_points(r.b_bp[3]), "42.00%");
    auto table = render_winrate_table(std::vector<WinRates>{r});
    EXPECT_NE(table.find("58.00%"), std::string::npos);
    EXPECT_NE(table.find("Global"), std::string::npos);
}

TEST(Judge, RandomPreferencesMatchOracleAndSumToHundred)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + rng() % 37;
        std::vector<JudgePair> pairs;
        long long a_halves = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto id = std::to_string(i);
            switch (rng() % 3) {
                case 0: pairs.push_back({"q" + id, "good " + id, "bad " + id}); a_halves += 2; break;
                case 1: pairs.push_back({"q" + id, "bad " + id, "good " + id}); break;
                default: pairs.push_back({"q" + id, "tie " + id, "tie2 " + id}); a_halves += 1; break;
            }
        }
        // ties are resolved by position, which splits the pair
        FakeJudge judge([](const std::string& f, const std::string& s) {
            if (f.find("tie") == 0 && s.find("tie") == 0) return 1;
            return prefers_good(f, s);
        });
        auto r = pairwise_judge(pairs, judge, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Hybrid);
        for (int d = 0; d < 4; ++d) {
            ASSERT_EQ(r.a_bp[d], oracle_bp(a_halves, static_cast<long long>(n)));
            ASSERT_EQ(r.a_bp[d] + r.b_bp[d], 10000);
        }
    }
}

TEST(Judge, MalformedReplyIsRetriedOnceThenExcluded)
{
    FakeJudge retried(prefers_good);
    retried.garble_first_n = 1;
    std::vector<JudgePair> one{{"q", "good", "bad"}};
    auto r = pairwise_judge(one, retried, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Hybrid);
    EXPECT_EQ(r.judged_pairs, 1u);
    EXPECT_EQ(r.a_bp[0], 10000);
    EXPECT_EQ(retried.calls.load(), 3);

    FakeJudge broken(prefers_good);
    broken.garble_first_n = 1000;
    EXPECT_THROW(pairwise_judge(one, broken, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Hybrid),
                 ProtocolError);

    FakeJudge partial(prefers_good);
    partial.garble_first_n = 2;
    std::vector<JudgePair> two{{"q", "good", "bad"}, {"q2", "bad", "good"}};
    auto p = pairwise_judge(two, partial, agent::PromptSet::builtin().judge, knowledge::RetrievalMode::Hybrid);
    EXPECT_EQ(p.excluded_pairs, 1u);
    EXPECT_EQ(p.judged_pairs, 1u);
}

TEST(Judge, InputValidation)
{
    FakeJudge judge(prefers_good);
    EXPECT_THROW(pairwise_judge(std::vector<JudgePair>{}, judge, agent::PromptSet::builtin().judge,
                                knowledge::RetrievalMode::Hybrid),
                 InputError);
    std::vector<std::string> q{"a", "b"}, a{"x"}, b{"y", "z"};
    EXPECT_THROW(make_pairs(q, a, b), InputError);
    EXPECT_EQ(parse_judge_pairs("{\"question\": \"q\", \"answer_a\": \"a\", \"answer_b\": \"b\"}\n").size(), 1u);
    EXPECT_EQ(load_judge_pairs(fx::data_path("eval/judge_pairs.jsonl").string()).size(), 1u);
}

// ---------------------------------------------------------------------------
// Planning

TEST(Planning, PerTaskAndUnweightedAverage)
{
    std::vector<PlanningCase> cases{{"a1", "scene", "Scene", {}},
                                    {"a2", "scene", "Scene", {}},
                                    {"b1", "caption", "Captioning", {}},
                                    {"c1", "road_extraction", "Roads", {}}};
    PlanningAgent agent = [](const PlanningCase& c) -> agent::AgentTrace {
        if (c.query == "a2") return trace_with_first_tool("caption");
        if (c.query == "c1") throw agent::PlanningError("no answer", {});
        return trace_with_first_tool(c.expected_first_tool);
    };
    for (std::size_t par : {1u, 4u}) {
        auto rep = eval_task_planning(cases, agent, par);
        ASSERT_EQ(rep.per_task.size(), 3u);
        EXPECT_EQ(rep.per_task[0].task_label, "Scene");
        EXPECT_DOUBLE_EQ(rep.per_task[0].accuracy, 0.5);
        EXPECT_DOUBLE_EQ(rep.per_task[1].accuracy, 1.0);
        EXPECT_DOUBLE_EQ(rep.per_task[2].accuracy, 0.0);
        EXPECT_DOUBLE_EQ(rep.average, 0.5);
        EXPECT_TRUE(rep.outcomes[3].error.has_value());
        auto table = render_planning_table(rep);
        EXPECT_NE(table.find("Average Accuracy | 50.00%"), std::string::npos) << table;
    }
    EXPECT_THROW(eval_task_planning(std::vector<PlanningCase>{}, agent), InputError);
}

TEST(Planning, ParsesCaseFiles)
{
    auto cases = parse_planning_cases(
        "{\"query\": \"q\", \"expected_first_tool\": \"scene\", \"task_label\": \"Scene\", \"image\": \"x.png\"}\n");
    ASSERT_EQ(cases.size(), 1u);
    EXPECT_EQ(cases[0].image, "x.png");
    EXPECT_THROW(parse_planning_cases("{\"query\": \"q\"}\n"), InputError);
    EXPECT_EQ(load_planning_cases(fx::data_path("eval/planning_golden.jsonl").string()).size(), 10u);
}

TEST(Planning, GoldenCasesThroughController)
{
    fx::TempDir dir;
    auto app = service::App::build(fx::offline_config(dir.str()));
    auto cases = fx::golden_cases();
    auto resolver = [](const std::string& img) { return (fx::data_path("eval") / img).lexically_normal().string(); };
    auto agent = controller_agent(*app->controller, {}, [&](const std::string& p) { return app->import_image(resolver(p)); });
    auto rep = eval_task_planning(cases, agent, 3);
    EXPECT_DOUBLE_EQ(rep.average, 1.0);
    EXPECT_EQ(to_json(rep)["average"], 1.0);
}
