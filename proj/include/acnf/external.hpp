#pragma once

#include <acnf/errors.hpp>
#include <acnf/evaluation.hpp>
#include <acnf/detail/text.hpp>
#include <acnf/space.hpp>

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace acnf {

/// A child process run through `/bin/sh -c`, with line-oriented pipes on its
/// stdin and stdout. stderr is inherited.
class ChildProcess {
public:
    using clock = std::chrono::steady_clock;

    enum class Read { line, timeout, eof };

    explicit ChildProcess(const std::string& command) {
        static const bool sigpipe_ignored = [] {
            std::signal(SIGPIPE, SIG_IGN);
            return true;
        }();
        (void)sigpipe_ignored;

        int to_child[2], from_child[2];
        if (::pipe2(to_child, O_CLOEXEC) != 0) throw SetupError("pipe: " + std::string(std::strerror(errno)));
        if (::pipe2(from_child, O_CLOEXEC) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw SetupError("pipe: " + std::string(std::strerror(errno)));
        }
        pid_ = ::fork();
        if (pid_ < 0) {
            for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
            throw SetupError("fork: " + std::string(std::strerror(errno)));
        }
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            std::signal(SIGPIPE, SIG_DFL);
            const std::string script = "exec " + command;
            ::execl("/bin/sh", "sh", "-c", script.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        in_fd_ = to_child[1];
        out_fd_ = from_child[0];
    }

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    ~ChildProcess() {
        close_stdin();
        if (out_fd_ >= 0) ::close(out_fd_);
        if (!exit_code_) {
            ::kill(pid_, SIGKILL);
            int status = 0;
            ::waitpid(pid_, &status, 0);
        }
    }

    /// False if the child no longer reads its stdin.
    bool write_line(const std::string& line) {
        if (in_fd_ < 0) return false;
        std::string data = line + '\n';
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                return false;
            }
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

    Read read_line(std::string& line, clock::time_point deadline) {
        while (true) {
            if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
                line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return Read::line;
            }
            if (eof_) return Read::eof;
            const auto now = clock::now();
            if (now >= deadline) return Read::timeout;
            const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
            pollfd pfd{out_fd_, POLLIN, 0};
            const int r = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait, 60'000)));
            if (r < 0 && errno == EINTR) continue;
            if (r <= 0) continue;
            char chunk[4096];
            const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) {
                eof_ = true;
                continue;
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void close_stdin() {
        if (in_fd_ >= 0) ::close(in_fd_);
        in_fd_ = -1;
    }

    /// Exit code once the child has exited (128 + signal if killed), nullopt if
    /// still running at the deadline.
    std::optional<int> wait_exit(clock::time_point deadline) {
        while (!exit_code_) {
            int status = 0;
            const pid_t r = ::waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                exit_code_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
                break;
            }
            if (clock::now() >= deadline) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
        return exit_code_;
    }

    void kill() {
        if (exit_code_) return;
        ::kill(pid_, SIGKILL);
        wait_exit(clock::time_point::max());
    }

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buffer_;
    bool eof_ = false;
    std::optional<int> exit_code_;
};

/// Evaluator living in a child process that speaks the JSON-lines protocol:
/// hello handshake, one eval request in flight, shutdown. Whatever the child
/// sends, evaluate() returns a well-formed Evaluation; transport faults come
/// back as protocol_error.
class ExternalEvaluator final : public Evaluator {
public:
    static constexpr int protocol_version = 1;
    /// The hello reply may take at least this long, whatever the request
    /// timeout: process start-up is not evaluation time.
    static constexpr double handshake_floor_s = 2.0;

    struct Handshake {
        bool ok = false;
        std::string name;
        std::string problem;
    };

    /// With `strict` set a failed handshake throws SetupError; otherwise it is
    /// recorded in handshake() and later requests still go out.
    ExternalEvaluator(SearchSpace space, const std::string& command, double timeout_s, int input_size,
                      bool strict = true)
        : space_(std::move(space)), timeout_s_(timeout_s), input_size_(input_size) {
        if (!(timeout_s > 0.0) || !std::isfinite(timeout_s)) throw ConfigError("timeout-s: must be > 0");
        child_.emplace(command);
        handshake_ = do_handshake();
        if (!handshake_.ok && strict) throw SetupError("external evaluator handshake failed: " + handshake_.problem);
    }

    ExternalEvaluator(const ExternalEvaluator&) = delete;
    ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

    ~ExternalEvaluator() override {
        if (!shut_down_) shutdown(std::min(timeout_s_, 2.0));
    }

    const Handshake& handshake() const noexcept { return handshake_; }
    bool dead() const noexcept { return dead_; }
    double timeout_s() const noexcept { return timeout_s_; }

    Evaluation evaluate(const Combination& c) override { return evaluate_within(c, timeout_s_); }

    /// Like evaluate() with an explicit reply deadline. A reply that arrives
    /// after its deadline is discarded when read later.
    Evaluation evaluate_within(const Combination& c, double seconds) {
        if (dead_) return Evaluation::failure(Status::protocol_error, "evaluator process is dead");
        const std::uint64_t id = next_id_++;
        nlohmann::json combo = nlohmann::json::object();
        const auto labels = space_.labels(c);
        for (std::size_t d = 0; d < labels.size(); ++d) combo[space_.dimension(d).name] = labels[d];
        const nlohmann::json request = {
            {"type", "eval"}, {"id", id}, {"combination", combo}, {"input_size", input_size_}};
        if (!child_->write_line(request.dump())) {
            dead_ = true;
            return Evaluation::failure(Status::protocol_error, "evaluator process closed its input");
        }
        const auto deadline = ChildProcess::clock::now() + to_duration(seconds);
        while (true) {
            std::string line;
            switch (child_->read_line(line, deadline)) {
            case ChildProcess::Read::timeout:
                abandoned_.insert(id);
                return Evaluation::failure(Status::timeout, "no reply within " + format_seconds(seconds));
            case ChildProcess::Read::eof:
                dead_ = true;
                return Evaluation::failure(Status::protocol_error, "evaluator process exited mid-request");
            case ChildProcess::Read::line: break;
            }
            nlohmann::json reply = nlohmann::json::parse(line, nullptr, false);
            if (reply.is_discarded() || !reply.is_object())
                return Evaluation::failure(Status::protocol_error, "malformed reply: " + clip(line));
            const auto rid = reply.find("id");
            if (rid != reply.end() && rid->is_number_unsigned() && abandoned_.erase(rid->get<std::uint64_t>()))
                continue;
            return interpret(reply, id, line);
        }
    }

    /// Sends shutdown, closes stdin and waits for the child. Returns its exit
    /// code, or nullopt if it had to be killed.
    std::optional<int> shutdown(double wait_s) {
        shut_down_ = true;
        child_->write_line(nlohmann::json{{"type", "shutdown"}}.dump());
        child_->close_stdin();
        auto code = child_->wait_exit(ChildProcess::clock::now() + to_duration(wait_s));
        if (!code) child_->kill();
        dead_ = true;
        return code;
    }

private:
    static ChildProcess::clock::duration to_duration(double seconds) {
        return std::chrono::duration_cast<ChildProcess::clock::duration>(std::chrono::duration<double>(seconds));
    }

    static std::string format_seconds(double s) { return detail::format_shortest(s) + " s"; }

    static std::string clip(const std::string& s) { return s.size() > 200 ? s.substr(0, 200) + "..." : s; }

    Handshake do_handshake() {
        Handshake h;
        if (!child_->write_line(nlohmann::json{{"type", "hello"}, {"protocol", protocol_version}}.dump())) {
            h.problem = "child closed its input";
            return h;
        }
        std::string line;
        const double wait = std::max(timeout_s_, handshake_floor_s);
        switch (child_->read_line(line, ChildProcess::clock::now() + to_duration(wait))) {
        case ChildProcess::Read::timeout: h.problem = "no hello reply within " + format_seconds(wait); return h;
        case ChildProcess::Read::eof:
            dead_ = true;
            h.problem = "child exited before replying to hello";
            return h;
        case ChildProcess::Read::line: break;
        }
        const auto reply = nlohmann::json::parse(line, nullptr, false);
        if (reply.is_discarded() || !reply.is_object() || reply.value("type", "") != "hello") {
            h.problem = "malformed hello reply: " + clip(line);
            return h;
        }
        const auto proto = reply.find("protocol");
        if (proto == reply.end() || !proto->is_number_integer() || proto->get<long long>() != protocol_version) {
            h.problem = "protocol mismatch: child speaks " + (proto == reply.end() ? "nothing" : proto->dump()) +
                        ", expected " + std::to_string(protocol_version);
            return h;
        }
        const auto name = reply.find("name");
        if (name == reply.end() || !name->is_string()) {
            h.problem = "hello reply lacks a name";
            return h;
        }
        h.name = name->get<std::string>();
        h.ok = true;
        return h;
    }

    Evaluation interpret(const nlohmann::json& reply, std::uint64_t id, const std::string& line) const {
        auto bad = [&](const std::string& why) {
            return Evaluation::failure(Status::protocol_error, why + ": " + clip(line));
        };
        if (reply.value("type", "") != "result") return bad("expected a result message");
        const auto rid = reply.find("id");
        if (rid == reply.end() || !rid->is_number_unsigned()) return bad("result without a numeric id");
        if (rid->get<std::uint64_t>() != id) return bad("unexpected id (wanted " + std::to_string(id) + ")");
        const auto st = reply.find("status");
        if (st == reply.end() || !st->is_string()) return bad("result without a status");
        const std::string status = st->get<std::string>();
        const std::string detail = reply.contains("detail") && reply["detail"].is_string()
                                       ? reply["detail"].get<std::string>()
                                       : std::string{};
        if (status == "ok") {
            const auto acc = reply.find("accuracy");
            const auto time = reply.find("time_s");
            if (acc == reply.end() || !acc->is_number() || time == reply.end() || !time->is_number())
                return bad("ok result needs numeric accuracy and time_s");
            const double a = acc->get<double>(), t = time->get<double>();
            if (!(a >= 0.0 && a <= 1.0)) return bad("accuracy outside [0, 1]");
            if (!(t > 0.0) || !std::isfinite(t)) return bad("time_s must be > 0");
            return Evaluation::success(a, t);
        }
        if (status == "incompatible" || status == "error")
            return Evaluation::failure(Status::incompatible, status == "error" ? "child error: " + detail : detail);
        if (status == "resource_exhausted") return Evaluation::failure(Status::resource_exhausted, detail);
        if (status == "timeout") return Evaluation::failure(Status::timeout, detail);
        return bad("unknown status '" + status + "'");
    }

    SearchSpace space_;
    double timeout_s_;
    int input_size_;
    std::optional<ChildProcess> child_;
    Handshake handshake_;
    std::uint64_t next_id_ = 1;
    std::set<std::uint64_t> abandoned_;
    bool dead_ = false;
    bool shut_down_ = false;
};

} // namespace acnf
