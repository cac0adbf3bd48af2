#include "rsagent/tools/mock_tools.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>

namespace fs = std::filesystem;
using nlohmann::json;

namespace rsagent::tools {

namespace {

constexpr auto kImage = InputKind::ImagePath;

std::string percent(double fraction)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
    return buf;
}

std::string counts_phrase(const std::map<std::string, int>& counts)
{
    std::vector<std::string> parts;
    for (const auto& [label, n] : counts) parts.push_back(label + " x" + std::to_string(n));
    return text::join(parts, ", ");
}

std::map<std::string, int> count_labels(const json& objects)
{
    std::map<std::string, int> counts;
    for (const auto& o : objects) ++counts[o.at("label").get<std::string>()];
    return counts;
}

std::map<std::string, int> count_strings(const json& items)
{
    std::map<std::string, int> counts;
    for (const auto& s : items) ++counts[s.get<std::string>()];
    return counts;
}

// Fractions listed largest first, ties by class name.
std::string fractions_phrase(const json& shares, bool parenthesized)
{
    std::vector<std::pair<std::string, double>> items;
    for (auto it = shares.begin(); it != shares.end(); ++it) items.emplace_back(it.key(), it.value().get<double>());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> parts;
    for (const auto& [name, f] : items)
        parts.push_back(parenthesized ? name + " (" + percent(f) + ")" : name + " " + percent(f));
    return text::join(parts, ", ");
}

// Inserts a tEXt chunk before IEND so the output is a distinct, valid PNG.
std::string derived_bytes(const std::string& original, const std::string& tool)
{
    static const std::string png_sig("\x89PNG\r\n\x1a\n", 8);
    std::string keyword_text = std::string("rsagent") + '\0' + tool;
    if (original.compare(0, png_sig.size(), png_sig) == 0 && original.size() >= 20) {
        auto iend = original.rfind("IEND");
        if (iend != std::string::npos && iend >= 4) {
            std::string chunk;
            auto len = static_cast<std::uint32_t>(keyword_text.size());
            for (int i = 3; i >= 0; --i) chunk.push_back(static_cast<char>((len >> (8 * i)) & 0xFF));
            std::string body = "tEXt" + keyword_text;
            chunk += body;
            auto crc = static_cast<std::uint32_t>(
                crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
            for (int i = 3; i >= 0; --i) chunk.push_back(static_cast<char>((crc >> (8 * i)) & 0xFF));
            std::string out = original;
            out.insert(iend - 4, chunk);
            return out;
        }
    }
    return original + "\nrsagent:" + tool + "\n";
}

} // namespace

const std::vector<ToolDescriptor>& builtin_tool_descriptors()
{
    static const std::vector<ToolDescriptor> table{
        {"cloud_removal", "Cloud removal from satellite images", "Remove the clouds in this image.", kImage, true},
        {"image_dehazing", "Haze removal from images", "Dehaze this foggy image.", kImage, true},
        {"super_resolution", "Image super-resolution (2x)", "Enhance the resolution of this image.", kImage, true},
        {"denoising", "Image denoising", "Remove noise from this image.", kImage, true},
        {"caption", "Geo-specific VQA and captioning", "What is in this remote sensing image?",
         InputKind::ImagePathAndText, false},
        {"optical_detection", "Optical image target detection", "Detect objects in this optical image.", kImage, true},
        {"optical_plane_type", "Aircraft type recognition in optical images", "What type of aircraft is in this image?",
         kImage, false},
        {"scene", "Scene classification", "What is the scene category of this image?", kImage, false},
        {"sar_detection", "Target detection in SAR images", "Find the objects in this SAR image.", kImage, true},
        {"sar_plane_type", "Aircraft type recognition in SAR images", "Identify the aircraft in this SAR image.", kImage,
         false},
        {"knowledge_search", "Aircraft info retrieval via Knowledge Database", "Who manufactures Boeing 747?",
         InputKind::Text, false},
        {"building_damage_detection", "Building damage assessment", "Which buildings are damaged?", kImage, true},
        {"building_extraction", "Building extraction from images", "Extract all buildings from the image.", kImage, true},
        {"road_extraction", "Road extraction from images", "Extract roads from the scene.", kImage, true},
        {"horizontal_object_detection", "Horizontal bounding box detection", "Detect objects using horizontal boxes.",
         kImage, true},
        {"rotated_object_detection", "Rotated object detection", "Detect objects using rotated boxes.", kImage, true},
        {"semantic_segmentation", "Pixel-wise semantic segmentation", "Segment the different regions in this image.",
         kImage, true},
        {"land_use_classification", "Land use categorization", "What are the land use types in this image?", kImage,
         false},
    };
    return table;
}

const ToolDescriptor& knowledge_search_descriptor()
{
    for (const auto& d : builtin_tool_descriptors())
        if (d.name == "knowledge_search") return d;
    throw std::logic_error("knowledge_search missing from builtin table");
}

FixtureCatalog::FixtureCatalog(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw InputError("fixture directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() != ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto side = f;
        side += ".json";
        if (!fs::exists(side)) continue;
        add(text::sha256_hex(text::read_file(f.string())), json::parse(text::read_file(side.string())));
    }
}

void FixtureCatalog::add(const std::string& sha256, json manifest)
{
    by_hash_[sha256] = std::move(manifest);
}

std::optional<json> FixtureCatalog::find(const std::string& sha256) const
{
    if (auto it = by_hash_.find(sha256); it != by_hash_.end()) return it->second;
    return std::nullopt;
}

MockToolExecutor::MockToolExecutor(MockContext context) : ctx_(std::move(context))
{
    if (!ctx_.images) throw ConfigError("mock tools need an image store");
}

json MockToolExecutor::manifest_for(const std::string& tool, const std::string& ref) const
{
    if (auto side = ctx_.images->sidecar(ref)) return *side;
    if (ctx_.catalog)
        if (auto m = ctx_.catalog->find(ref.substr(0, ref.find('.')))) return *m;
    throw ToolExecutionError(tool, "no ground-truth manifest for image " + ref);
}

std::string MockToolExecutor::derive_image(const std::string& tool, const std::string& ref)
{
    auto bytes = derived_bytes(ctx_.images->read(ref), tool);
    auto ext = ref.substr(ref.find('.') + 1);
    auto out = ctx_.images->put(bytes, ext);
    std::optional<json> manifest = ctx_.images->sidecar(ref);
    if (!manifest && ctx_.catalog) manifest = ctx_.catalog->find(ref.substr(0, ref.find('.')));
    if (manifest && !ctx_.images->sidecar(out)) ctx_.images->put_sidecar(out, *manifest);
    return out;
}

ToolOutput MockToolExecutor::run(const ToolDescriptor& d, const ToolInput& input)
{
    const auto& tool = d.name;
    if (!input.image_ref) throw ToolExecutionError(tool, "no input image");
    const auto& ref = *input.image_ref;
    if (!ctx_.images->exists(ref)) throw ToolExecutionError(tool, "input image not found: " + ref);

    auto field = [&](const char* key) -> json {
        auto m = manifest_for(tool, ref);
        if (!m.contains(key)) throw ToolExecutionError(tool, std::string("manifest has no '") + key + "'");
        return m[key];
    };

    ToolOutput out;
    if (tool == "cloud_removal" || tool == "image_dehazing" || tool == "super_resolution" || tool == "denoising") {
        static const std::map<std::string, std::string> verbs{{"cloud_removal", "Removed clouds"},
                                                              {"image_dehazing", "Removed haze"},
                                                              {"super_resolution", "Upscaled the image 2x"},
                                                              {"denoising", "Removed noise"}};
        out.produced_image_ref = derive_image(tool, ref);
        out.text_result = verbs.at(tool) + "; result saved as " + *out.produced_image_ref + ".";
        out.payload = {{"source", ref}};
        if (tool == "super_resolution") out.payload["scale"] = 2;
    } else if (tool == "caption") {
        auto m = manifest_for(tool, ref);
        std::string answer;
        if (m.contains("vqa"))
            for (auto it = m["vqa"].begin(); it != m["vqa"].end(); ++it)
                if (text::to_lower(input.text_args).find(text::to_lower(it.key())) != std::string::npos) {
                    answer = it.value().get<std::string>();
                    break;
                }
        if (answer.empty()) answer = field("caption").get<std::string>();
        out.text_result = answer;
        out.payload = {{"answer", answer}};
    } else if (tool == "optical_detection" || tool == "sar_detection") {
        auto objects = field(tool == "optical_detection" ? "objects" : "sar_objects");
        auto counts = count_labels(objects);
        out.produced_image_ref = derive_image(tool, ref);
        out.text_result = "Detected " + std::to_string(objects.size()) + " objects" +
                          (counts.empty() ? std::string(".") : ": " + counts_phrase(counts) + ".");
        json boxes = json::array();
        for (const auto& o : objects) boxes.push_back({{"label", o.at("label")}, {"box", o.at("box")}});
        out.payload = {{"total", objects.size()}, {"counts", counts}, {"boxes", boxes}};
    } else if (tool == "horizontal_object_detection" || tool == "rotated_object_detection") {
        auto objects = field("objects");
        const bool rotated = tool == "rotated_object_detection";
        json boxes = json::array();
        for (const auto& o : objects) {
            const auto& b = o.at("box");
            if (rotated) {
                double x = b.at(0), y = b.at(1), w = b.at(2), h = b.at(3);
                boxes.push_back({{"label", o.at("label")},
                                 {"rbox", {x + w / 2, y + h / 2, w, h, o.value("angle", 0.0)}}});
            } else {
                boxes.push_back({{"label", o.at("label")}, {"box", b}});
            }
        }
        out.produced_image_ref = derive_image(tool, ref);
        out.text_result = std::to_string(objects.size()) + (rotated ? " rotated" : " horizontal") +
                          " boxes: " + counts_phrase(count_labels(objects)) + ".";
        out.payload = {{"boxes", boxes}};
    } else if (tool == "optical_plane_type" || tool == "sar_plane_type") {
        auto types = field(tool == "optical_plane_type" ? "plane_types" : "sar_plane_types");
        auto counts = count_strings(types);
        out.text_result = "Aircraft types: " + (counts.empty() ? std::string("none") : counts_phrase(counts)) + ".";
        out.payload = {{"types", counts}};
    } else if (tool == "scene") {
        auto scene = field("scene").get<std::string>();
        out.text_result = "Scene category: " + scene + ".";
        out.payload = {{"scene", scene}};
    } else if (tool == "building_extraction" || tool == "building_damage_detection") {
        auto buildings = field("buildings");
        out.produced_image_ref = derive_image(tool, ref);
        if (tool == "building_extraction") {
            out.text_result = "Extracted " + std::to_string(buildings.size()) + " buildings.";
            out.payload = {{"buildings", buildings.size()}};
        } else {
            std::map<std::string, int> levels;
            json damaged = json::array();
            for (const auto& b : buildings) {
                auto level = b.value("damage", std::string("none"));
                if (level == "none") continue;
                ++levels[level];
                damaged.push_back(b.at("id"));
            }
            out.text_result = std::to_string(damaged.size()) + " of " + std::to_string(buildings.size()) +
                              " buildings damaged" +
                              (levels.empty() ? std::string(".") : " (" + counts_phrase(levels) + ").");
            out.payload = {{"damaged_ids", damaged}, {"levels", levels}, {"total", buildings.size()}};
        }
    } else if (tool == "road_extraction") {
        double coverage = field("road_coverage").get<double>();
        out.produced_image_ref = derive_image(tool, ref);
        out.text_result = "Road pixels cover " + percent(coverage) + " of the image.";
        out.payload = {{"road_coverage", coverage}};
    } else if (tool == "semantic_segmentation") {
        auto segments = field("segments");
        out.produced_image_ref = derive_image(tool, ref);
        out.text_result = "Segmented regions: " + fractions_phrase(segments, false) + ".";
        out.payload = {{"segments", segments}};
    } else if (tool == "land_use_classification") {
        auto shares = field("land_use");
        out.text_result = "Land use types: " + fractions_phrase(shares, true) + ".";
        out.payload = {{"land_use", shares}};
    } else {
        throw ToolExecutionError(tool, "no mock implementation for this tool");
    }
    return out;
}

void register_mock_image_tools(ToolRegistry& registry, MockContext context)
{
    auto executor = std::make_shared<MockToolExecutor>(std::move(context));
    for (const auto& d : builtin_tool_descriptors())
        if (d.name != "knowledge_search") registry.register_tool(d, executor);
    registry.add_alias(kSuperResolutionAlias, "super_resolution");
}

} // namespace rsagent::tools
