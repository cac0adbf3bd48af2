#include "rsagent/service/repl.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace rsagent::service {

namespace {

constexpr const char* kPrompt = "rsagent> ";
constexpr std::size_t kResultPreview = 160;

std::string preview(std::string s)
{
    for (auto& c : s)
        if (c == '\n') c = ' ';
    if (s.size() > kResultPreview) {
        auto cut = kResultPreview;
        while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
        s = s.substr(0, cut) + "...";
    }
    return s;
}

std::string score_text(double score)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", score);
    return buf;
}

} // namespace

std::string render_trace_text(const agent::AgentTrace& trace)
{
    std::string out;
    std::size_t i = 0;
    for (const auto& e : trace.events) {
        out += std::to_string(++i) + ". " + std::string(agent::event_kind(e)) + ": ";
        if (const auto* t = std::get_if<agent::TaskInferred>(&e)) {
            out += t->task_type;
            if (t->normalized) out += " (from reply \"" + preview(t->raw_reply) + "\")";
        } else if (const auto* s = std::get_if<agent::SolutionRetrieved>(&e)) {
            out += s->task_type + " (score " + score_text(s->score) + ")";
        } else if (const auto* c = std::get_if<agent::ToolInvoked>(&e)) {
            out += c->name;
            if (!c->input.text_args.empty()) out += " <- \"" + preview(c->input.text_args) + "\"";
            if (c->error)
                out += " -> error: " + preview(*c->error);
            else if (c->output)
                out += " -> " + preview(c->output->text_result);
        } else if (const auto* k = std::get_if<agent::KnowledgeRetrieved>(&e)) {
            std::vector<std::string> kws;
            for (const auto& w : k->keywords) kws.push_back(w.text + ":" + std::to_string(w.weight));
            out += text::join(kws, ", ") + " -> " + std::to_string(k->guidance.documents.size()) + " documents";
        } else if (const auto* f = std::get_if<agent::FinalAnswer>(&e)) {
            out += preview(f->text);
            if (f->image_ref) out += " [image " + *f->image_ref + "]";
        }
        out += "\n";
    }
    return out;
}

Repl::Repl(App& app, std::istream& in, std::ostream& out, agent::SessionFlags flags) : app_(app), in_(in), out_(out)
{
    session_id_ = app_.sessions->create(flags).session_id;
}

void Repl::print_help()
{
    out_ << "Commands:\n"
            "  :image <path>  attach an image to the next query\n"
            "  :trace         show the trace of the last answer\n"
            "  :help          show this help\n"
            "  :quit          exit\n"
            "Any other line is sent to the agent.\n";
}

void Repl::handle_query(const std::string& line)
{
    auto image = pending_image_;
    pending_image_.reset();
    app_.sessions->with_session(session_id_, [&](agent::SessionState& session) {
        try {
            auto response = app_.controller->handle_query(session, line, image);
            out_ << response.answer << "\n";
            if (response.processed_image_ref)
                out_ << "[image: " << *response.processed_image_ref << "]\n";
            last_trace_ = std::move(response.trace);
        } catch (const agent::PlanningError& e) {
            last_trace_ = e.trace();
            out_ << "error: " << e.what() << "\n";
        } catch (const std::exception& e) {
            out_ << "error: " << e.what() << "\n";
        }
    });
}

int Repl::run()
{
    std::string line;
    while (true) {
        out_ << kPrompt << std::flush;
        if (!std::getline(in_, line)) {
            out_ << "\n";
            return 0;
        }
        auto t = std::string(text::trim(line));
        if (t.empty()) continue;
        if (t.front() != ':') {
            handle_query(t);
            continue;
        }
        auto space = t.find(' ');
        auto cmd = t.substr(0, space);
        auto arg = space == std::string::npos ? std::string() : std::string(text::trim(t.substr(space + 1)));
        if (cmd == ":quit" || cmd == ":q") return 0;
        if (cmd == ":trace") {
            if (last_trace_)
                out_ << render_trace_text(*last_trace_);
            else
                out_ << "no trace yet\n";
        } else if (cmd == ":image" && !arg.empty()) {
            try {
                pending_image_ = app_.import_image(arg);
                out_ << "image attached: " << *pending_image_ << "\n";
            } catch (const std::exception& e) {
                out_ << "error: " << e.what() << "\n";
            }
        } else {
            if (cmd != ":help") out_ << "unknown command " << cmd << "\n";
            print_help();
        }
    }
}

} // namespace rsagent::service
