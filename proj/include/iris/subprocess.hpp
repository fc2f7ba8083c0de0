#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace iris {

// One child process invocation. argv[0] is the executable; no shell is ever
// involved, so arguments are passed through byte-exact.
struct RunSpec {
    std::vector<std::string> argv;
    std::filesystem::path cwd;                                  // empty = inherit
    std::string stdin_data;
    std::chrono::duration<double> timeout{60.0};
    std::vector<std::pair<std::string, std::string>> extra_env; // appended to environ
};

struct RunResult {
    int exit_code = -1;
    bool timed_out = false;
    bool signaled = false;
    int term_signal = 0;
    std::string stdout_bytes; // raw, unsanitized
    std::string stderr_bytes;
    double wall_s = 0.0;
    double user_s = 0.0;
    double sys_s = 0.0;
    long max_rss_kib = 0;     // child peak RSS from wait4(); 0 when unavailable

    bool ok() const { return !timed_out && !signaled && exit_code == 0; }
};

// Spawns the child in its own process group, feeds stdin, drains stdout and
// stderr concurrently, and kills the whole group on timeout. Throws
// ConfigError when the executable cannot be spawned at all.
RunResult run_process(const RunSpec& spec);

// Replaces byte sequences that are not valid UTF-8 with U+FFFD. Used for tool
// diagnostics; never applied to I/O test payloads.
std::string sanitize_utf8(const std::string& bytes);

// mkdtemp-backed scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "iris");
    ~TempDir();
    TempDir(TempDir&& other) noexcept;
    TempDir& operator=(TempDir&& other) noexcept;
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace iris
