#include "rsagent/eval/planning.hpp"

#include "rsagent/eval/format.hpp"
#include "rsagent/text.hpp"

#include <atomic>
#include <map>
#include <thread>

namespace rsagent::eval {

using nlohmann::json;

std::vector<PlanningCase> parse_planning_cases(const std::string& jsonl)
{
    std::vector<PlanningCase> cases;
    int line_no = 0;
    for (const auto& raw : text::split_lines(jsonl)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            auto j = json::parse(line);
            PlanningCase c{j.at("query"), j.at("expected_first_tool"), j.at("task_label"), std::nullopt};
            if (j.contains("image") && !j["image"].is_null()) c.image = j["image"].get<std::string>();
            cases.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw InputError("planning cases line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cases;
}

std::vector<PlanningCase> load_planning_cases(const std::string& path)
{
    return parse_planning_cases(text::read_file(path));
}

PlanningReport eval_task_planning(std::span<const PlanningCase> cases, const PlanningAgent& agent,
                                  std::size_t parallelism)
{
    if (cases.empty()) throw InputError("eval_task_planning: no cases");
    PlanningReport report;
    report.outcomes.resize(cases.size());

    auto run_case = [&](std::size_t i) {
        auto& out = report.outcomes[i];
        out.planning_case = cases[i];
        try {
            auto trace = agent(cases[i]);
            out.first_tool = agent::first_tool(trace);
            out.correct = out.first_tool == cases[i].expected_first_tool;
            out.trace = std::move(trace);
        } catch (const std::exception& e) {
            out.error = e.what();
            out.correct = false;
        }
    };

    const auto workers = std::max<std::size_t>(1, std::min(parallelism, cases.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < cases.size(); ++i) run_case(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cases.size(); i = next++) run_case(i);
            });
        for (auto& t : pool) t.join();
    }

    std::map<std::string, std::size_t> slot;
    for (const auto& o : report.outcomes) {
        auto [it, fresh] = slot.try_emplace(o.planning_case.task_label, report.per_task.size());
        if (fresh) report.per_task.push_back({o.planning_case.task_label, 0, 0, 0.0});
        auto& t = report.per_task[it->second];
        ++t.total;
        if (o.correct) ++t.correct;
    }
    double sum = 0.0;
    for (auto& t : report.per_task) {
        t.accuracy = static_cast<double>(t.correct) / static_cast<double>(t.total);
        sum += t.accuracy;
    }
    report.average = sum / static_cast<double>(report.per_task.size());
    return report;
}

PlanningAgent controller_agent(const agent::Controller& controller, agent::SessionFlags flags,
                               std::function<std::string(const std::string&)> resolve_image)
{
    return [&controller, flags, resolve_image](const PlanningCase& c) {
        agent::SessionState session;
        session.session_id = "eval";
        session.flags = flags;
        std::optional<std::string> image;
        if (c.image) image = resolve_image ? resolve_image(*c.image) : *c.image;
        return controller.handle_query(session, c.query, image).trace;
    };
}

std::string render_planning_table(const PlanningReport& report, const std::string& column)
{
    std::vector<std::vector<std::string>> rows{{"Task", column}};
    for (const auto& t : report.per_task) rows.push_back({t.task_label, format_percent(t.accuracy)});
    rows.push_back({"Average Accuracy", format_percent(report.average)});
    return render_table(rows);
}

json to_json(const PlanningReport& report)
{
    json tasks = json::array();
    for (const auto& t : report.per_task)
        tasks.push_back({{"task_label", t.task_label},
                         {"correct", t.correct},
                         {"total", t.total},
                         {"accuracy", t.accuracy},
                         {"accuracy_text", format_percent(t.accuracy)}});
    json cases = json::array();
    for (const auto& o : report.outcomes) {
        json c{{"query", o.planning_case.query},
               {"task_label", o.planning_case.task_label},
               {"expected_first_tool", o.planning_case.expected_first_tool},
               {"correct", o.correct}};
        c["first_tool"] = o.first_tool ? json(*o.first_tool) : json(nullptr);
        c["error"] = o.error ? json(*o.error) : json(nullptr);
        cases.push_back(std::move(c));
    }
    return {{"per_task", tasks},
            {"average", report.average},
            {"average_text", format_percent(report.average)},
            {"cases", cases}};
}

} // namespace rsagent::eval
