#pragma once

#include "rsagent/agent/trace.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

namespace rsagent::agent {

/// Ablation switches, fixed when the session is created.
struct SessionFlags {
    bool task_inference_enabled = true;
    bool solution_retrieval_enabled = true;

    bool operator==(const SessionFlags&) const = default;
};

enum class TurnRole { User, Agent };

struct ConversationTurn {
    TurnRole role = TurnRole::User;
    std::string text;
    std::optional<std::string> attached_image_ref;
    std::optional<std::size_t> trace_ref; // index into SessionState::traces

    bool operator==(const ConversationTurn&) const = default;
};

struct SessionState {
    std::string session_id;
    std::int64_t created_at_ms = 0; // Unix epoch milliseconds
    SessionFlags flags;
    std::vector<ConversationTurn> history;
    std::optional<std::string> current_image_ref;
    std::vector<AgentTrace> traces;
    std::uint64_t next_frame_seq = 1; // event frames sent to clients
};

nlohmann::json to_json(const SessionFlags& flags);
SessionFlags flags_from_json(const nlohmann::json& j); // missing keys default to true
nlohmann::json to_json(const ConversationTurn& turn);
nlohmann::json to_json(const SessionState& session);

/// Thread-safe session table. Each session has its own mutex so one
/// request at a time runs against it while other sessions proceed.
class SessionStore {
public:
    using IdGenerator = std::function<std::string()>;

    /// Random 128-bit hex ids by default.
    explicit SessionStore(IdGenerator ids = {});

    SessionState create(SessionFlags flags);
    std::optional<SessionState> snapshot(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::size_t size() const;

    /// Runs `fn` with exclusive access to the session. Returns false when
    /// the id is unknown.
    bool with_session(const std::string& id, const std::function<void(SessionState&)>& fn);

private:
    struct Entry {
        std::mutex mutex;
        SessionState state;
    };

    IdGenerator ids_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

} // namespace rsagent::agent
