#include "rsagent/tools/adapters.hpp"

#include "rsagent/error.hpp"
#include "rsagent/text.hpp"

#include <httplib.h>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

extern char** environ;

namespace rsagent::tools {

namespace {

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string path;
};

UrlParts split_url(const std::string& url)
{
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("URL needs a scheme: " + url);
    auto slash = url.find('/', scheme_end + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    bool timed_out = false;
};

ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout)
{
    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
    if (pipe(err_pipe) != 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        throw Error(std::string("pipe: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], 2);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);
    posix_spawn_file_actions_addclose(&actions, err_pipe[0]);

    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    pid_t pid = 0;
    int rc = posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(out_pipe[1]);
    close(err_pipe[1]);
    if (rc != 0) {
        close(out_pipe[0]);
        close(err_pipe[0]);
        throw Error("cannot start " + argv[0] + ": " + std::strerror(rc));
    }

    ProcessResult result;
    std::array<pollfd, 2> fds{{{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}}};
    auto deadline = std::chrono::steady_clock::now() + timeout;
    int open_fds = 2;
    char buf[4096];
    while (open_fds > 0) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            result.timed_out = true;
            kill(pid, SIGKILL);
            break;
        }
        int n = poll(fds.data(), fds.size(), static_cast<int>(left.count()));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) continue;
        for (std::size_t i = 0; i < fds.size(); ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            auto got = read(fds[i].fd, buf, sizeof buf);
            if (got > 0) {
                (i == 0 ? result.out : result.err).append(buf, static_cast<std::size_t>(got));
            } else {
                close(fds[i].fd);
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }
    for (auto& f : fds)
        if (f.fd >= 0) close(f.fd);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {}
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    return result;
}

std::string fetch_url(const std::string& tool, const std::string& url)
{
    auto parts = split_url(url);
    httplib::Client client(parts.origin);
    auto res = client.Get(parts.path);
    if (!res || res->status != 200)
        throw ToolExecutionError(tool, "cannot download produced image " + url, res ? res->body : "");
    return res->body;
}

} // namespace

ToolOutput parse_adapter_reply(const std::string& tool, const std::string& body, ImageStore& images)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text::trim(body));
    } catch (const nlohmann::json::exception&) {
        throw ToolExecutionError(tool, "reply is not JSON", body);
    }
    if (!j.is_object() || !j.contains("text_result") || !j["text_result"].is_string())
        throw ToolExecutionError(tool, "reply lacks a text_result string", body);

    ToolOutput out;
    out.text_result = j["text_result"].get<std::string>();
    if (j.contains("payload")) out.payload = j["payload"];
    if (j.contains("produced_image") && j["produced_image"].is_string() && !j["produced_image"].get<std::string>().empty()) {
        auto where = j["produced_image"].get<std::string>();
        if (text::istarts_with(where, "http://") || text::istarts_with(where, "https://")) {
            auto ext = std::filesystem::path(split_url(where).path).extension().string();
            out.produced_image_ref = images.put(fetch_url(tool, where), ext);
        } else {
            if (!std::filesystem::exists(where)) throw ToolExecutionError(tool, "produced image missing: " + where, body);
            out.produced_image_ref = images.import_file(where);
        }
    }
    return out;
}

SubprocessExecutor::SubprocessExecutor(std::string binary, std::shared_ptr<ImageStore> images, int pool_size,
                                       std::chrono::milliseconds timeout)
    : binary_(std::move(binary)), images_(std::move(images)), timeout_(timeout), free_slots_(pool_size)
{
    if (binary_.empty()) throw ConfigError("subprocess adapter needs a binary");
    if (!images_) throw ConfigError("subprocess adapter needs an image store");
    if (pool_size < 1) throw ConfigError("subprocess pool size must be >= 1");
}

ToolOutput SubprocessExecutor::run(const ToolDescriptor& descriptor, const ToolInput& input)
{
    {
        std::unique_lock lock(mutex_);
        slot_freed_.wait(lock, [&] { return free_slots_ > 0; });
        --free_slots_;
    }
    struct Release {
        SubprocessExecutor* self;
        ~Release()
        {
            {
                std::lock_guard lock(self->mutex_);
                ++self->free_slots_;
            }
            self->slot_freed_.notify_one();
        }
    } release{this};

    std::vector<std::string> argv{binary_};
    if (input.image_ref) {
        argv.push_back("--input");
        argv.push_back(images_->path_of(*input.image_ref).string());
    }
    argv.push_back("--args");
    argv.push_back(input.text_args);

    ProcessResult res;
    try {
        res = run_process(argv, timeout_);
    } catch (const Error& e) {
        throw ToolExecutionError(descriptor.name, e.what());
    }
    if (res.timed_out) throw ToolExecutionError(descriptor.name, "timed out", res.err);
    if (res.exit_code != 0)
        throw ToolExecutionError(descriptor.name, "exited with status " + std::to_string(res.exit_code), res.err);
    return parse_adapter_reply(descriptor.name, res.out, *images_);
}

HttpExecutor::HttpExecutor(std::string url, std::shared_ptr<ImageStore> images, std::chrono::milliseconds timeout)
    : url_(std::move(url)), images_(std::move(images)), timeout_(timeout)
{
    split_url(url_);
    if (!images_) throw ConfigError("http adapter needs an image store");
}

ToolOutput HttpExecutor::run(const ToolDescriptor& descriptor, const ToolInput& input)
{
    auto parts = split_url(url_);
    httplib::Client client(parts.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_read_timeout(secs.count(), 0);
    client.set_connection_timeout(secs.count(), 0);

    httplib::MultipartFormDataItems items{{"text", input.text_args, "", ""}};
    if (input.image_ref) {
        auto path = images_->path_of(*input.image_ref);
        items.push_back({"image", images_->read(*input.image_ref), path.filename().string(),
                         "application/octet-stream"});
    }
    auto res = client.Post(parts.path, items);
    if (!res) throw ToolExecutionError(descriptor.name, "transport failure: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw ToolExecutionError(descriptor.name, "HTTP " + std::to_string(res->status), res->body);
    return parse_adapter_reply(descriptor.name, res->body, *images_);
}

} // namespace rsagent::tools
