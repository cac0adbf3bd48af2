#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rsagent::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

/// Maximal runs of ASCII [A-Za-z0-9], lowercased. Every other byte separates.
std::vector<std::string> tokenize(std::string_view s);

/// Tokens joined by single spaces: "  Cloud-Removal " -> "cloud removal".
std::string normalize(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Replaces every occurrence of `from` in `s`.
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

} // namespace rsagent::text
