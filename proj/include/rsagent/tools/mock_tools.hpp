#pragma once

// Manifest-driven stand-ins for the 18 toolkit models.
//
// Each mock reads the ground truth for its input image from a JSON manifest
// and formats it as the real tool would. The manifest is looked up, in
// order, as the image store sidecar (<ref>.json) and then in a fixture
// catalog keyed by the SHA-256 of the image bytes.
//
// Manifest fields (all optional; a tool fails if the one it needs is missing):
//   caption        str                      caption
//   vqa            {question: answer}       caption (matched case-insensitively)
//   scene          str                      scene
//   objects        [{label, box:[x,y,w,h], angle}]
//                                           optical_detection,
//                                           horizontal/rotated_object_detection
//   plane_types    [str]                    optical_plane_type
//   sar_objects    [{label, box:[x,y,w,h]}] sar_detection
//   sar_plane_types [str]                   sar_plane_type
//   buildings      [{id, damage}]           building_extraction,
//                                           building_damage_detection
//                                           (damage "none" means intact)
//   road_coverage  number in [0,1]          road_extraction
//   segments       {class: fraction}        semantic_segmentation
//   land_use       {class: fraction}        land_use_classification
//
// Image-producing mocks write a derived copy of the input (PNG inputs get a
// tEXt chunk naming the tool) and give it the source manifest as sidecar, so
// chained tools keep working on the processed image.

#include "rsagent/tools/image_store.hpp"
#include "rsagent/tools/registry.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <vector>

namespace rsagent::tools {

/// The 18 descriptors in toolkit-table order (knowledge_search included).
const std::vector<ToolDescriptor>& builtin_tool_descriptors();

/// Spelling used by some solution documents for super_resolution.
inline constexpr const char* kSuperResolutionAlias = "super_resolution_2x";

/// Ground truth keyed by SHA-256 of image bytes, built by scanning a
/// directory for "<image>.json" sidecars.
class FixtureCatalog {
public:
    FixtureCatalog() = default;
    explicit FixtureCatalog(const std::filesystem::path& dir);

    void add(const std::string& sha256, nlohmann::json manifest);
    std::optional<nlohmann::json> find(const std::string& sha256) const;
    std::size_t size() const noexcept { return by_hash_.size(); }

private:
    std::map<std::string, nlohmann::json> by_hash_;
};

struct MockContext {
    std::shared_ptr<ImageStore> images;
    std::shared_ptr<const FixtureCatalog> catalog; // may be null
};

/// Executor for one of the image mocks, selected by descriptor name.
class MockToolExecutor final : public ToolExecutor {
public:
    explicit MockToolExecutor(MockContext context);

    ToolOutput run(const ToolDescriptor& descriptor, const ToolInput& input) override;

private:
    nlohmann::json manifest_for(const std::string& tool, const std::string& ref) const;
    std::string derive_image(const std::string& tool, const std::string& ref);

    MockContext ctx_;
};

/// Registers the 17 image mocks plus the super_resolution_2x alias.
/// knowledge_search is left to the caller (it needs a knowledge store).
void register_mock_image_tools(ToolRegistry& registry, MockContext context);

/// Descriptor for knowledge_search from the builtin table.
const ToolDescriptor& knowledge_search_descriptor();

} // namespace rsagent::tools
