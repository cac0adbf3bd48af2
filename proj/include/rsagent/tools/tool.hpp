#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace rsagent::tools {

enum class InputKind { ImagePath, Text, ImagePathAndText };

std::string_view to_string(InputKind kind);
InputKind input_kind_from_string(std::string_view s);
bool needs_image(InputKind kind);

struct ToolDescriptor {
    std::string name;          // snake_case identifier
    std::string function;      // one-line description shown to the planner
    std::string example_input;
    InputKind input_kind = InputKind::ImagePath;
    bool produces_image = false;

    bool operator==(const ToolDescriptor&) const = default;
};

struct ToolInput {
    std::string text_args;
    std::optional<std::string> image_ref; // image store ref

    bool operator==(const ToolInput&) const = default;
};

struct ToolOutput {
    std::string text_result;
    std::optional<std::string> produced_image_ref;
    nlohmann::json payload; // null when the tool reports nothing structured

    bool operator==(const ToolOutput&) const = default;
};

nlohmann::json to_json(const ToolDescriptor& d);
nlohmann::json to_json(const ToolInput& in);
nlohmann::json to_json(const ToolOutput& out);

/// Runs one tool. Throw ToolExecutionError on failure.
class ToolExecutor {
public:
    virtual ~ToolExecutor() = default;

    virtual ToolOutput run(const ToolDescriptor& descriptor, const ToolInput& input) = 0;

    /// False when calls must be serialized.
    virtual bool allows_concurrent_calls() const { return true; }
};

} // namespace rsagent::tools
