#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace rsagent::tools {

/// Content-addressed image files under one directory.
///
/// A ref is "<sha256 of bytes>.<ext>"; the file lives at root/ref. A
/// ground-truth sidecar, when present, is root/ref + ".json".
class ImageStore {
public:
    explicit ImageStore(std::filesystem::path root);

    /// Writes the bytes (idempotent) and returns the ref.
    std::string put(std::string_view bytes, std::string_view extension);

    /// Copies a file into the store, along with "<path>.json" if present.
    std::string import_file(const std::filesystem::path& path);

    bool exists(const std::string& ref) const;
    /// Throws InputError for malformed refs (guards against path traversal).
    std::filesystem::path path_of(const std::string& ref) const;
    std::string read(const std::string& ref) const;

    std::optional<nlohmann::json> sidecar(const std::string& ref) const;
    void put_sidecar(const std::string& ref, const nlohmann::json& manifest);

    const std::filesystem::path& root() const noexcept { return root_; }

    static bool is_valid_ref(std::string_view ref);

private:
    std::filesystem::path root_;
};

} // namespace rsagent::tools
