#include "iris/subprocess.hpp"

#include "iris/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace iris {

namespace {

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

double to_seconds(const struct timeval& tv) {
    return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) / 1e6;
}

} // namespace

RunResult run_process(const RunSpec& spec) {
    if (spec.argv.empty())
        throw ConfigError("run_process: empty argv");

    int in_pipe[2] = {-1, -1};
    int out_pipe[2] = {-1, -1};
    int err_pipe[2] = {-1, -1};
    if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
        throw ConfigError(std::string("pipe: ") + std::strerror(errno));

    // exec failure in the child is reported back through a CLOEXEC pipe;
    // it stays empty on success.
    int exec_pipe[2] = {-1, -1};
    if (::pipe2(exec_pipe, O_CLOEXEC) != 0)
        throw ConfigError(std::string("pipe2: ") + std::strerror(errno));

    std::vector<std::string> env_storage;
    std::vector<char*> envp;
    if (!spec.extra_env.empty()) {
        for (char** e = environ; *e != nullptr; ++e)
            envp.push_back(*e);
        for (const auto& [k, v] : spec.extra_env) {
            env_storage.push_back(k + "=" + v);
            envp.push_back(env_storage.back().data());
        }
        envp.push_back(nullptr);
    }

    std::vector<char*> argv;
    argv.reserve(spec.argv.size() + 1);
    for (const auto& a : spec.argv)
        argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const pid_t pid = ::fork();
    if (pid < 0)
        throw ConfigError(std::string("fork: ") + std::strerror(errno));

    if (pid == 0) {
        // Child. Own process group so a timeout kill reaps grandchildren
        // (gcc spawns cc1/as, clang spawns cc1 in some modes).
        ::setpgid(0, 0);
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        for (int* p : {in_pipe, out_pipe, err_pipe}) {
            ::close(p[0]);
            ::close(p[1]);
        }
        ::close(exec_pipe[0]);
        if (!spec.cwd.empty() && ::chdir(spec.cwd.c_str()) != 0)
            _exit(127);
        if (envp.empty())
            ::execvp(argv[0], argv.data());
        else
            ::execvpe(argv[0], argv.data(), envp.data());
        const int err = errno;
        (void)!::write(exec_pipe[1], &err, sizeof(err));
        _exit(127);
    }

    // Parent.
    close_fd(in_pipe[0]);
    close_fd(out_pipe[1]);
    close_fd(err_pipe[1]);
    close_fd(exec_pipe[1]);

    int exec_errno = 0;
    {
        const ssize_t n = ::read(exec_pipe[0], &exec_errno, sizeof(exec_errno));
        if (n <= 0)
            exec_errno = 0;
    }
    close_fd(exec_pipe[0]);
    if (exec_errno != 0) {
        close_fd(in_pipe[1]);
        close_fd(out_pipe[0]);
        close_fd(err_pipe[0]);
        int status = 0;
        ::waitpid(pid, &status, 0);
        throw ConfigError("cannot execute '" + spec.argv[0] + "': " + std::strerror(exec_errno));
    }

    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(spec.timeout);

    std::size_t stdin_off = 0;
    if (spec.stdin_data.empty())
        close_fd(in_pipe[1]);

    bool killed = false;
    while (out_pipe[0] >= 0 || err_pipe[0] >= 0 || in_pipe[1] >= 0) {
        struct pollfd fds[3];
        int nfds = 0;
        int out_idx = -1, err_idx = -1, in_idx = -1;
        if (out_pipe[0] >= 0) {
            out_idx = nfds;
            fds[nfds++] = {out_pipe[0], POLLIN, 0};
        }
        if (err_pipe[0] >= 0) {
            err_idx = nfds;
            fds[nfds++] = {err_pipe[0], POLLIN, 0};
        }
        if (in_pipe[1] >= 0) {
            in_idx = nfds;
            fds[nfds++] = {in_pipe[1], POLLOUT, 0};
        }

        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            if (!killed) {
                ::kill(-pid, SIGKILL);
                killed = true;
                result.timed_out = true;
            }
            // keep draining so the child can exit; pipes will hit EOF
        }
        const auto remaining = killed ? std::chrono::milliseconds(100)
                                      : std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
        const int timeout_ms = static_cast<int>(std::max<long long>(1, remaining.count()));

        const int rc = ::poll(fds, static_cast<nfds_t>(nfds), timeout_ms);
        if (rc < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        if (rc == 0)
            continue; // deadline re-checked at loop top

        char buf[65536];
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP | POLLERR))) {
            const ssize_t n = ::read(out_pipe[0], buf, sizeof(buf));
            if (n > 0)
                result.stdout_bytes.append(buf, static_cast<std::size_t>(n));
            else
                close_fd(out_pipe[0]);
        }
        if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP | POLLERR))) {
            const ssize_t n = ::read(err_pipe[0], buf, sizeof(buf));
            if (n > 0)
                result.stderr_bytes.append(buf, static_cast<std::size_t>(n));
            else
                close_fd(err_pipe[0]);
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLHUP | POLLERR))) {
            if (fds[in_idx].revents & (POLLHUP | POLLERR)) {
                close_fd(in_pipe[1]); // child closed stdin early; not an error
            } else {
                const std::size_t chunk = std::min<std::size_t>(65536, spec.stdin_data.size() - stdin_off);
                const ssize_t n = ::write(in_pipe[1], spec.stdin_data.data() + stdin_off, chunk);
                if (n > 0) {
                    stdin_off += static_cast<std::size_t>(n);
                    if (stdin_off >= spec.stdin_data.size())
                        close_fd(in_pipe[1]);
                } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
                    close_fd(in_pipe[1]);
                }
            }
        }
    }
    close_fd(in_pipe[1]);

    int status = 0;
    struct rusage usage;
    std::memset(&usage, 0, sizeof(usage));
    ::wait4(pid, &status, 0, &usage);

    result.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.user_s = to_seconds(usage.ru_utime);
    result.sys_s = to_seconds(usage.ru_stime);
    result.max_rss_kib = usage.ru_maxrss;

    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.signaled = true;
        result.term_signal = WTERMSIG(status);
        result.exit_code = -WTERMSIG(status);
    }
    return result;
}

std::string sanitize_utf8(const std::string& bytes) {
    static const char replacement[] = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto cont = [&](std::size_t j) {
        return j < bytes.size() && (static_cast<unsigned char>(bytes[j]) & 0xC0) == 0x80;
    };
    while (i < bytes.size()) {
        const unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t len = 0;
        if (c < 0x80)
            len = 1;
        else if ((c & 0xE0) == 0xC0 && c >= 0xC2)
            len = 2;
        else if ((c & 0xF0) == 0xE0)
            len = 3;
        else if ((c & 0xF8) == 0xF0 && c <= 0xF4)
            len = 4;

        bool valid = len > 0;
        for (std::size_t j = 1; valid && j < len; ++j)
            valid = cont(i + j);
        if (valid && len == 3) {
            const unsigned char c1 = static_cast<unsigned char>(bytes[i + 1]);
            if ((c == 0xE0 && c1 < 0xA0) || (c == 0xED && c1 > 0x9F))
                valid = false; // overlong / surrogate
        }
        if (valid && len == 4) {
            const unsigned char c1 = static_cast<unsigned char>(bytes[i + 1]);
            if ((c == 0xF0 && c1 < 0x90) || (c == 0xF4 && c1 > 0x8F))
                valid = false;
        }

        if (valid) {
            out.append(bytes, i, len);
            i += len;
        } else {
            out.append(replacement, 3);
            i += 1;
        }
    }
    return out;
}

TempDir::TempDir(const std::string& prefix) {
    std::string tmpl = (std::filesystem::temp_directory_path() / (prefix + "-XXXXXX")).string();
    if (::mkdtemp(tmpl.data()) == nullptr)
        throw ConfigError(std::string("mkdtemp: ") + std::strerror(errno));
    path_ = tmpl;
}

TempDir::~TempDir() {
    if (!path_.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
}

TempDir::TempDir(TempDir&& other) noexcept : path_(std::move(other.path_)) {
    other.path_.clear();
}

TempDir& TempDir::operator=(TempDir&& other) noexcept {
    if (this != &other) {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(path_, ec);
        }
        path_ = std::move(other.path_);
        other.path_.clear();
    }
    return *this;
}

} // namespace iris
