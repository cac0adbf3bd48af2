#include "support.hpp"

#include "rsagent/error.hpp"
#include "rsagent/solution/solution_store.hpp"
#include "rsagent/text.hpp"
#include "rsagent/tools/mock_tools.hpp"
#include "rsagent/tools/registry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rsagent;
using namespace rsagent::solution;
namespace fx = rsagent::fixtures;

namespace {

class NullExecutor : public tools::ToolExecutor {
public:
    tools::ToolOutput run(const tools::ToolDescriptor&, const tools::ToolInput&) override { return {"", {}, nullptr}; }
};

struct Kit {
    std::shared_ptr<index::HashingEmbedder> embedder = std::make_shared<index::HashingEmbedder>();
    fx::TempDir dir;
    tools::ToolRegistry registry;
    SolutionStore store{embedder};
    std::vector<SolutionDocument> docs = load_solution_corpus(fx::data_path("solutions.jsonl").string());

    Kit()
    {
        tools::register_mock_image_tools(registry, {std::make_shared<tools::ImageStore>(dir.path()), nullptr});
        registry.register_tool(tools::knowledge_search_descriptor(), std::make_shared<NullExecutor>());
    }
};

} // namespace

TEST(SolutionCorpus, FixtureHasEighteenTasks)
{
    Kit kit;
    ASSERT_EQ(kit.docs.size(), 18u);
    EXPECT_EQ(kit.docs.front().task_type, "Cloud Removal");
    EXPECT_EQ(kit.docs.front().tools, std::vector<std::string>{"cloud_removal"});
    EXPECT_EQ(embedding_text(kit.docs.front()), "Cloud Removal — " + kit.docs.front().guidance);
}

TEST(SolutionStore, IngestAndListLabels)
{
    Kit kit;
    EXPECT_EQ(kit.store.ingest_solutions(kit.docs, kit.registry), 18u);
    auto labels = kit.store.list_task_types();
    ASSERT_EQ(labels.size(), 18u);
    EXPECT_TRUE(std::is_sorted(labels.begin(), labels.end()));
}

TEST(SolutionStore, VerbatimLabelsRetrieveTheirOwnDocument)
{
    Kit kit;
    kit.store.ingest_solutions(kit.docs, kit.registry);
    for (const auto& d : kit.docs) {
        auto g = kit.store.retrieve_solution(d.task_type);
        EXPECT_EQ(g.document.task_type, d.task_type);
        EXPECT_NEAR(g.score, 1.0, 1e-6);
        EXPECT_EQ(g.query_task_type, d.task_type);
    }
}

TEST(SolutionStore, ParaphrasesRetrieveTheBruteForceArgmax)
{
    Kit kit;
    kit.store.ingest_solutions(kit.docs, kit.registry);
    std::vector<std::string> vocab;
    for (const auto& d : kit.docs)
        for (auto& t : text::tokenize(d.task_type + " " + d.guidance)) vocab.push_back(t);
    vocab.insert(vocab.end(), {"please", "image", "this", "the", "satellite", "zzz"});
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        std::string q;
        const int len = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < len; ++i) q += vocab[rng() % vocab.size()] + " ";
        EXPECT_EQ(kit.store.retrieve_solution(q).document.task_type, fx::oracle_solution(*kit.embedder, kit.docs, q))
            << q;
    }
}

TEST(SolutionStore, Errors)
{
    Kit kit;
    EXPECT_THROW(kit.store.retrieve_solution("Cloud Removal"), EmptyIndexError);
    EXPECT_THROW(kit.store.ingest_solutions({}, kit.registry), InputError);
    auto dup = std::vector<SolutionDocument>{kit.docs[0], kit.docs[0]};
    EXPECT_THROW(kit.store.ingest_solutions(dup, kit.registry), IngestError);
    auto unknown = kit.docs[0];
    unknown.tools = {"teleport"};
    EXPECT_THROW(kit.store.ingest_solutions({unknown}, kit.registry), IngestError);
    auto blank = kit.docs[0];
    blank.task_type = " ";
    EXPECT_THROW(kit.store.ingest_solutions({blank}, kit.registry), IngestError);
    EXPECT_EQ(kit.store.size(), 0u); // failed batches store nothing
    kit.store.ingest_solutions({kit.docs[0]}, kit.registry);
    EXPECT_THROW(kit.store.retrieve_solution("  "), InputError);
}

TEST(SolutionStore, KnowledgeSearchDocumentMentionsQueryKeywords)
{
    Kit kit;
    kit.store.ingest_solutions(kit.docs, kit.registry);
    auto g = kit.store.retrieve_solution("Knowledge Search");
    EXPECT_EQ(g.document.tools, std::vector<std::string>{"knowledge_search"});
    EXPECT_NE(g.document.guidance.find("the keywords of the query"), std::string::npos);
}

TEST(SolutionStore, SingleDocumentIsAlwaysReturned)
{
    Kit kit;
    kit.store.ingest_solutions({kit.docs[5]}, kit.registry);
    EXPECT_EQ(kit.store.retrieve_solution("zzz unrelated words").document.task_type, kit.docs[5].task_type);
    EXPECT_EQ(kit.store.list_task_types(), std::vector<std::string>{kit.docs[5].task_type});
}

TEST(SolutionStore, IdenticalReingestKeepsResults)
{
    Kit kit;
    kit.store.ingest_solutions(kit.docs, kit.registry);
    auto before = kit.store.retrieve_solution("detect planes on the apron");
    kit.store.ingest_solutions(kit.docs, kit.registry);
    auto after = kit.store.retrieve_solution("detect planes on the apron");
    EXPECT_EQ(before.document, after.document);
    EXPECT_EQ(before.score, after.score);
    EXPECT_TRUE(SolutionStore(kit.embedder).list_task_types().empty());
}

TEST(SolutionStore, AliasToolNamesAreAccepted)
{
    Kit kit;
    auto d = kit.docs[2];
    d.tools = {"super_resolution_2x"};
    EXPECT_EQ(kit.store.ingest_solutions({d}, kit.registry), 1u);
}

TEST(SolutionStore, ReingestReplacesDocument)
{
    Kit kit;
    kit.store.ingest_solutions(kit.docs, kit.registry);
    auto d = kit.docs[0];
    d.guidance = "Updated recipe: call cloud_removal twice.";
    kit.store.ingest_solutions({d}, kit.registry);
    EXPECT_EQ(kit.store.size(), 18u);
    EXPECT_EQ(kit.store.retrieve_solution("Cloud Removal").document.guidance, d.guidance);
}

TEST(SolutionStore, SaveLoadRoundTrip)
{
    Kit kit;
    kit.store.ingest_solutions(kit.docs, kit.registry);
    fx::TempDir dir;
    kit.store.save(dir.str());
    SolutionStore loaded(kit.embedder);
    loaded.load(dir.str());
    EXPECT_EQ(loaded.documents(), kit.store.documents());
    auto a = loaded.retrieve_solution("remove clouds");
    auto b = kit.store.retrieve_solution("remove clouds");
    EXPECT_EQ(a.document, b.document);
    EXPECT_EQ(a.score, b.score);

    // A different embedding space forces a re-embed.
    SolutionStore other(std::make_shared<index::HashingEmbedder>(64));
    other.load(dir.str());
    EXPECT_EQ(other.retrieve_solution("Road Extraction").document.task_type, "Road Extraction");
}

TEST(SolutionCorpus, ParseErrorsNameTheLine)
{
    try {
        parse_solution_corpus("{\"task_type\": \"A\", \"guidance\": \"g\", \"tools\": [\"scene\"]}\nnot json\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
}
