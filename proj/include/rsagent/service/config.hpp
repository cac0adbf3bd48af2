#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rsagent::service {

/// Flat key = value settings.
///
/// File format: one "key = value" per line; '#' starts a comment line;
/// blank lines are ignored; later lines win. Every key can be overridden
/// from the environment as RSAGENT_<KEY>, upper-cased with '.' turned into
/// '_' (llm.model -> RSAGENT_LLM_MODEL). Command-line flags are applied last.
class Config {
public:
    /// Built-in defaults only.
    Config();

    static Config parse(const std::string& text, const std::string& origin = "config");
    static Config load(const std::string& path);

    /// Applies RSAGENT_* overrides for every known key.
    void apply_env(const std::function<std::optional<std::string>(const std::string&)>& getenv);
    void apply_env();

    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback = "") const;
    long long get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// Keys with the given prefix, e.g. "tools." for adapter bindings.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    static std::string env_name(const std::string& key);

private:
    std::map<std::string, std::string> values_;
};

} // namespace rsagent::service
