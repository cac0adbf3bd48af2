#include "rsagent/agent/session.hpp"

#include "rsagent/error.hpp"

#include <chrono>
#include <cstdio>

namespace rsagent::agent {

using nlohmann::json;

json to_json(const SessionFlags& flags)
{
    return {{"task_inference", flags.task_inference_enabled}, {"solution_retrieval", flags.solution_retrieval_enabled}};
}

SessionFlags flags_from_json(const json& j)
{
    SessionFlags f;
    if (j.is_null()) return f;
    if (!j.is_object()) throw InputError("flags must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!value.is_boolean()) throw InputError("flag '" + key + "' must be a boolean");
        if (key == "task_inference")
            f.task_inference_enabled = value.get<bool>();
        else if (key == "solution_retrieval")
            f.solution_retrieval_enabled = value.get<bool>();
        else
            throw InputError("unknown flag '" + key + "'");
    }
    return f;
}

json to_json(const ConversationTurn& turn)
{
    json j{{"role", turn.role == TurnRole::User ? "user" : "agent"}, {"text", turn.text}};
    j["image_ref"] = turn.attached_image_ref ? json(*turn.attached_image_ref) : json(nullptr);
    j["trace_ref"] = turn.trace_ref ? json(*turn.trace_ref) : json(nullptr);
    return j;
}

json to_json(const SessionState& session)
{
    json history = json::array();
    for (const auto& t : session.history) history.push_back(to_json(t));
    json traces = json::array();
    for (const auto& t : session.traces) traces.push_back(to_json(t));
    json j{{"session_id", session.session_id},
           {"created_at_ms", session.created_at_ms},
           {"flags", to_json(session.flags)},
           {"history", history},
           {"traces", traces}};
    j["current_image_ref"] = session.current_image_ref ? json(*session.current_image_ref) : json(nullptr);
    return j;
}

SessionStore::SessionStore(IdGenerator ids) : ids_(std::move(ids))
{
    if (!ids_) {
        auto rng = std::make_shared<std::mt19937_64>(std::random_device{}());
        auto rng_mutex = std::make_shared<std::mutex>();
        ids_ = [rng, rng_mutex] {
            std::lock_guard lock(*rng_mutex);
            char buf[33];
            std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>((*rng)()),
                          static_cast<unsigned long long>((*rng)()));
            return std::string(buf);
        };
    }
}

SessionState SessionStore::create(SessionFlags flags)
{
    auto entry = std::make_shared<Entry>();
    entry->state.flags = flags;
    entry->state.created_at_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::system_clock::now().time_since_epoch())
                                     .count();
    std::unique_lock lock(mutex_);
    std::string id;
    do {
        id = ids_();
    } while (sessions_.count(id));
    entry->state.session_id = id;
    sessions_.emplace(id, entry);
    return entry->state;
}

std::optional<SessionState> SessionStore::snapshot(const std::string& id) const
{
    std::shared_ptr<Entry> entry;
    {
        std::shared_lock lock(mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) return std::nullopt;
        entry = it->second;
    }
    std::lock_guard guard(entry->mutex);
    return entry->state;
}

bool SessionStore::contains(const std::string& id) const
{
    std::shared_lock lock(mutex_);
    return sessions_.count(id) > 0;
}

std::size_t SessionStore::size() const
{
    std::shared_lock lock(mutex_);
    return sessions_.size();
}

bool SessionStore::with_session(const std::string& id, const std::function<void(SessionState&)>& fn)
{
    std::shared_ptr<Entry> entry;
    {
        std::shared_lock lock(mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) return false;
        entry = it->second;
    }
    std::lock_guard guard(entry->mutex);
    fn(entry->state);
    return true;
}

} // namespace rsagent::agent
