#include "rsagent/tools/registry.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

namespace rsagent::tools {

std::string_view to_string(InputKind kind)
{
    switch (kind) {
        case InputKind::ImagePath: return "image_path";
        case InputKind::Text: return "text";
        case InputKind::ImagePathAndText: return "image_path+text";
    }
    return "text";
}

InputKind input_kind_from_string(std::string_view s)
{
    if (s == "image_path") return InputKind::ImagePath;
    if (s == "text") return InputKind::Text;
    if (s == "image_path+text") return InputKind::ImagePathAndText;
    throw InputError("unknown input kind: " + std::string(s));
}

bool needs_image(InputKind kind)
{
    return kind != InputKind::Text;
}

nlohmann::json to_json(const ToolDescriptor& d)
{
    return {{"name", d.name},
            {"function", d.function},
            {"example_input", d.example_input},
            {"input_kind", to_string(d.input_kind)},
            {"produces_image", d.produces_image}};
}

nlohmann::json to_json(const ToolInput& in)
{
    nlohmann::json j{{"text_args", in.text_args}};
    j["image_ref"] = in.image_ref ? nlohmann::json(*in.image_ref) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const ToolOutput& out)
{
    nlohmann::json j{{"text_result", out.text_result}, {"payload", out.payload}};
    j["produced_image_ref"] = out.produced_image_ref ? nlohmann::json(*out.produced_image_ref) : nlohmann::json(nullptr);
    return j;
}

void check_input_kind(const ToolDescriptor& descriptor, const ToolInput& input)
{
    const bool has_image = input.image_ref && !input.image_ref->empty();
    if (needs_image(descriptor.input_kind) && !has_image)
        throw InputError(descriptor.name + " needs an input image");
    if (!needs_image(descriptor.input_kind) && input.image_ref)
        throw InputError(descriptor.name + " takes text only, but an image was attached");
    if (descriptor.input_kind != InputKind::ImagePath && text::trim(input.text_args).empty())
        throw InputError(descriptor.name + " needs text arguments");
}

void ToolRegistry::register_tool(ToolDescriptor descriptor, std::shared_ptr<ToolExecutor> executor)
{
    if (descriptor.name.empty()) throw ConfigError("tool name is empty");
    if (descriptor.example_input.empty()) throw ConfigError(descriptor.name + ": example_input is empty");
    if (!executor) throw ConfigError(descriptor.name + ": executor is null");
    std::unique_lock lock(mutex_);
    if (by_name_.contains(descriptor.name) || aliases_.contains(descriptor.name))
        throw ConfigError("tool already registered: " + descriptor.name);
    Slot slot{std::move(descriptor), std::move(executor), nullptr};
    if (!slot.executor->allows_concurrent_calls()) slot.serial = std::make_shared<std::mutex>();
    by_name_.emplace(slot.descriptor.name, slots_.size());
    slots_.push_back(std::move(slot));
}

void ToolRegistry::rebind(const std::string& name, std::shared_ptr<ToolExecutor> executor)
{
    if (!executor) throw ConfigError(name + ": executor is null");
    std::unique_lock lock(mutex_);
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw ToolNotFoundError(name);
    auto& slot = slots_[it->second];
    slot.serial = executor->allows_concurrent_calls() ? nullptr : std::make_shared<std::mutex>();
    slot.executor = std::move(executor);
}

void ToolRegistry::add_alias(const std::string& alias, const std::string& target)
{
    std::unique_lock lock(mutex_);
    if (by_name_.contains(alias) || aliases_.contains(alias))
        throw ConfigError("tool already registered: " + alias);
    if (!by_name_.contains(target)) throw ToolNotFoundError(target);
    aliases_.emplace(alias, target);
}

std::optional<std::string> ToolRegistry::resolve(const std::string& name) const
{
    std::shared_lock lock(mutex_);
    if (by_name_.contains(name)) return name;
    if (auto it = aliases_.find(name); it != aliases_.end()) return it->second;
    return std::nullopt;
}

std::optional<ToolDescriptor> ToolRegistry::find(const std::string& name) const
{
    auto canonical = resolve(name);
    if (!canonical) return std::nullopt;
    std::shared_lock lock(mutex_);
    return slots_[by_name_.find(*canonical)->second].descriptor;
}

std::vector<ToolDescriptor> ToolRegistry::describe_tools() const
{
    std::shared_lock lock(mutex_);
    std::vector<ToolDescriptor> out;
    out.reserve(slots_.size());
    for (const auto& s : slots_) out.push_back(s.descriptor);
    return out;
}

std::size_t ToolRegistry::size() const
{
    std::shared_lock lock(mutex_);
    return slots_.size();
}

ToolOutput ToolRegistry::invoke(const std::string& name, const ToolInput& input) const
{
    Slot slot;
    {
        std::shared_lock lock(mutex_);
        auto it = by_name_.find(name);
        if (it == by_name_.end()) {
            auto alias = aliases_.find(name);
            if (alias == aliases_.end()) throw ToolNotFoundError(name);
            it = by_name_.find(alias->second);
        }
        slot = slots_[it->second];
    }
    check_input_kind(slot.descriptor, input);

    ToolOutput out;
    try {
        std::unique_lock<std::mutex> serial;
        if (slot.serial) serial = std::unique_lock(*slot.serial);
        out = slot.executor->run(slot.descriptor, input);
    } catch (const ToolExecutionError&) {
        throw;
    } catch (const std::exception& e) {
        throw ToolExecutionError(slot.descriptor.name, "executor failed", e.what());
    }

    const bool has_image = out.produced_image_ref && !out.produced_image_ref->empty();
    if (slot.descriptor.produces_image && !has_image)
        throw ToolExecutionError(slot.descriptor.name, "executor returned no image but the tool produces one");
    if (!slot.descriptor.produces_image && has_image)
        throw ToolExecutionError(slot.descriptor.name, "executor returned an image but the tool produces none");
    return out;
}

} // namespace rsagent::tools
