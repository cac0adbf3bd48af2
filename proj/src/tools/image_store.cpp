#include "rsagent/tools/image_store.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <atomic>
#include <fstream>
#include <thread>

namespace fs = std::filesystem;

namespace rsagent::tools {

namespace {

std::string clean_extension(std::string_view ext)
{
    if (!ext.empty() && ext.front() == '.') ext.remove_prefix(1);
    auto lower = text::to_lower(ext);
    if (lower.empty() || lower.size() > 5) return "bin";
    for (char c : lower)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return "bin";
    return lower;
}

// Writes via a temp file + rename so readers never see partial content.
void atomic_write(const fs::path& target, std::string_view bytes)
{
    static std::atomic<unsigned long> counter{0};
    auto tmp = target;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "-" +
           std::to_string(counter++);
    text::write_file(tmp.string(), bytes);
    fs::rename(tmp, target);
}

} // namespace

ImageStore::ImageStore(fs::path root) : root_(std::move(root))
{
    fs::create_directories(root_);
}

bool ImageStore::is_valid_ref(std::string_view ref)
{
    auto dot = ref.find('.');
    if (dot != 64 || ref.size() < 66 || ref.size() > 70) return false;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        char c = ref[i];
        if (i == dot) continue;
        bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z');
        if (!ok || (i < dot && c > 'f')) return false;
    }
    return true;
}

std::string ImageStore::put(std::string_view bytes, std::string_view extension)
{
    if (bytes.empty()) throw InputError("image is empty");
    auto ref = text::sha256_hex(bytes) + "." + clean_extension(extension);
    auto target = root_ / ref;
    if (!fs::exists(target)) atomic_write(target, bytes);
    return ref;
}

std::string ImageStore::import_file(const fs::path& path)
{
    auto ref = put(text::read_file(path.string()), path.extension().string());
    auto side = path;
    side += ".json";
    if (fs::exists(side) && !fs::exists(root_ / (ref + ".json")))
        atomic_write(root_ / (ref + ".json"), text::read_file(side.string()));
    return ref;
}

bool ImageStore::exists(const std::string& ref) const
{
    return is_valid_ref(ref) && fs::exists(root_ / ref);
}

fs::path ImageStore::path_of(const std::string& ref) const
{
    if (!is_valid_ref(ref)) throw InputError("malformed image ref: " + ref);
    return root_ / ref;
}

std::string ImageStore::read(const std::string& ref) const
{
    auto p = path_of(ref);
    if (!fs::exists(p)) throw InputError("no such image: " + ref);
    return text::read_file(p.string());
}

std::optional<nlohmann::json> ImageStore::sidecar(const std::string& ref) const
{
    auto p = path_of(ref);
    p += ".json";
    if (!fs::exists(p)) return std::nullopt;
    return nlohmann::json::parse(text::read_file(p.string()));
}

void ImageStore::put_sidecar(const std::string& ref, const nlohmann::json& manifest)
{
    auto p = path_of(ref);
    p += ".json";
    atomic_write(p, manifest.dump(2) + "\n");
}

} // namespace rsagent::tools
