#pragma once

// Executors that bind a registered tool to an external model.
//
// Both adapters expect one JSON object as the reply:
//   {"text_result": str, "produced_image": str (optional), "payload": any (optional)}
// produced_image is a local file path or an http(s) URL; the bytes are
// imported into the image store and the output carries the store ref.

#include "rsagent/tools/image_store.hpp"
#include "rsagent/tools/tool.hpp"

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>

namespace rsagent::tools {

/// Parses an adapter reply. Throws ToolExecutionError on schema violations.
ToolOutput parse_adapter_reply(const std::string& tool, const std::string& body, ImageStore& images);

/// Runs `<binary> --input <image path> --args <text>` (no --input for
/// text-only tools). Exit status 0 and a JSON object on stdout mean
/// success; otherwise ToolExecutionError carries stderr.
class SubprocessExecutor final : public ToolExecutor {
public:
    SubprocessExecutor(std::string binary, std::shared_ptr<ImageStore> images, int pool_size = 1,
                       std::chrono::milliseconds timeout = std::chrono::seconds(300));

    ToolOutput run(const ToolDescriptor& descriptor, const ToolInput& input) override;
    bool allows_concurrent_calls() const override { return true; } // bounded by the pool

private:
    std::string binary_;
    std::shared_ptr<ImageStore> images_;
    std::chrono::milliseconds timeout_;
    int free_slots_;
    std::mutex mutex_;
    std::condition_variable slot_freed_;
};

/// POSTs multipart/form-data (file part "image", field "text") to `url`.
class HttpExecutor final : public ToolExecutor {
public:
    HttpExecutor(std::string url, std::shared_ptr<ImageStore> images,
                 std::chrono::milliseconds timeout = std::chrono::seconds(300));

    ToolOutput run(const ToolDescriptor& descriptor, const ToolInput& input) override;

private:
    std::string url_;
    std::shared_ptr<ImageStore> images_;
    std::chrono::milliseconds timeout_;
};

} // namespace rsagent::tools
