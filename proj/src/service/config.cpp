#include "rsagent/service/config.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <cstdlib>

namespace rsagent::service {

namespace {

const std::map<std::string, std::string>& defaults()
{
    static const std::map<std::string, std::string> d{
        {"data_dir", "rsagent-data"},
        {"prompt_dir", ""},
        {"fixtures", ""},
        {"solutions", ""},
        {"knowledge", ""},
        {"extractor", "mock"},
        {"llm.backend", "scripted"},
        {"llm.script", ""},
        {"llm.base_url", "https://api.openai.com"},
        {"llm.model", "gpt-4o-mini"},
        {"llm.api_key_env", "OPENAI_API_KEY"},
        {"llm.timeout_s", "60"},
        {"llm.max_retries", "2"},
        {"llm.temperature", "0"},
        {"llm.max_tokens", "1024"},
        {"llm.seed", ""},
        {"embedder", "hash"},
        {"embedder.dimension", "256"},
        {"embedder.base_url", ""},
        {"embedder.model", "text-embedding-3-small"},
        {"embedder.api_key_env", "OPENAI_API_KEY"},
        {"retrieval.top_n", "30"},
        {"retrieval.mode", "hybrid"},
        {"retrieval.global_only", "false"},
        {"controller.max_steps", "6"},
        {"controller.history_turns", "20"},
        {"controller.summarize_history", "false"},
        {"eval.parallelism", "1"},
        {"server.host", "127.0.0.1"},
        {"server.port", "8080"},
        {"server.api_token_env", "RSAGENT_API_TOKEN"},
        {"server.static_dir", ""},
    };
    return d;
}

} // namespace

Config::Config() : values_(defaults()) {}

Config Config::parse(const std::string& text, const std::string& origin)
{
    Config c;
    int line_no = 0;
    for (const auto& raw : text::split_lines(text)) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        auto key = std::string(text::trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        c.values_[key] = std::string(text::trim(line.substr(eq + 1)));
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::string body;
    try {
        body = text::read_file(path);
    } catch (const Error& e) {
        throw ConfigError("cannot read config " + path + ": " + e.what());
    }
    return parse(body, path);
}

std::string Config::env_name(const std::string& key)
{
    std::string out = "RSAGENT_";
    for (char c : key) out += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

void Config::apply_env(const std::function<std::optional<std::string>(const std::string&)>& getenv)
{
    for (auto& [key, value] : values_)
        if (auto v = getenv(env_name(key))) value = *v;
}

void Config::apply_env()
{
    apply_env([](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    });
}

void Config::set(const std::string& key, std::string value)
{
    values_[key] = std::move(value);
}

bool Config::has(const std::string& key) const
{
    auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    auto it = values_.find(key);
    return it == values_.end() || it->second.empty() ? fallback : it->second;
}

long long Config::get_int(const std::string& key) const
{
    auto v = get(key);
    try {
        std::size_t used = 0;
        auto n = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("setting " + key + " is not an integer: '" + v + "'");
    }
}

double Config::get_double(const std::string& key) const
{
    auto v = get(key);
    try {
        std::size_t used = 0;
        auto n = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("setting " + key + " is not a number: '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key) const
{
    auto v = text::to_lower(get(key));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
    throw ConfigError("setting " + key + " is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const
{
    std::vector<std::string> out;
    for (const auto& [key, _] : values_)
        if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
}

} // namespace rsagent::service
