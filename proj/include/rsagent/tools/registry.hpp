#pragma once

#include "rsagent/tools/tool.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <vector>

namespace rsagent::tools {

/// The toolkit: a name <-> descriptor bijection plus one executor per tool.
class ToolRegistry {
public:
    /// Throws ConfigError when the name (or an alias) is already taken.
    void register_tool(ToolDescriptor descriptor, std::shared_ptr<ToolExecutor> executor);

    /// Swaps the executor behind an existing tool (e.g. bind a real model).
    void rebind(const std::string& name, std::shared_ptr<ToolExecutor> executor);

    /// Makes `alias` resolve to `target`. Aliases never show up in describe_tools().
    void add_alias(const std::string& alias, const std::string& target);

    /// Canonical name for `name` or one of its aliases; nullopt when unknown.
    std::optional<std::string> resolve(const std::string& name) const;
    bool contains(const std::string& name) const { return resolve(name).has_value(); }
    std::optional<ToolDescriptor> find(const std::string& name) const;

    /// Registration order.
    std::vector<ToolDescriptor> describe_tools() const;
    std::size_t size() const;

    /// Runs the tool. Throws ToolNotFoundError for an unknown name,
    /// InputError when `input` does not fit the descriptor's input kind, and
    /// ToolExecutionError when the executor fails or breaks the
    /// produces_image contract.
    ToolOutput invoke(const std::string& name, const ToolInput& input) const;

private:
    struct Slot {
        ToolDescriptor descriptor;
        std::shared_ptr<ToolExecutor> executor;
        std::shared_ptr<std::mutex> serial; // set when the executor is not reentrant
    };

    mutable std::shared_mutex mutex_;
    std::vector<Slot> slots_;
    std::map<std::string, std::size_t, std::less<>> by_name_;
    std::map<std::string, std::string, std::less<>> aliases_;
};

/// Throws InputError when `input` does not match `kind`.
void check_input_kind(const ToolDescriptor& descriptor, const ToolInput& input);

} // namespace rsagent::tools
