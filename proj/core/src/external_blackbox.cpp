#include "xferbo/external_blackbox.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <memory>
#include <mutex>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "xferbo/errors.hpp"

namespace xferbo {

ExternalDescriptor ExternalDescriptor::from_json(const nlohmann::json& j) {
    ExternalDescriptor d;
    try {
        if (j.contains("name")) d.name = j.at("name").get<std::string>();
        const auto& cmd = j.at("command");
        if (cmd.is_string()) {
            d.command = {"/bin/sh", "-c", cmd.get<std::string>()};
        } else {
            d.command = cmd.get<std::vector<std::string>>();
        }
        for (const auto& v : j.at("variables"))
            d.variables.push_back({v.at("name").get<std::string>(), v.at("lower").get<double>(),
                                   v.at("upper").get<double>()});
        if (j.contains("constraints"))
            for (const auto& c : j.at("constraints"))
                d.constraints.push_back(
                    {c.at("name").get<std::string>(),
                     c.contains("category") ? parse_category(c.at("category").get<std::string>())
                                            : ConstraintCategory::other});
        if (j.contains("timeout_seconds")) d.timeout_seconds = j.at("timeout_seconds").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("external descriptor: ") + e.what());
    }
    if (d.command.empty()) throw ConfigError("external descriptor: empty command");
    if (!(d.timeout_seconds > 0.0)) throw ConfigError("external descriptor: timeout_seconds must be positive");
    try {
        validate_variables(d.variables);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("external descriptor: ") + e.what());
    }
    return d;
}

nlohmann::json ExternalDescriptor::to_json() const {
    nlohmann::json vars = nlohmann::json::array(), cons = nlohmann::json::array();
    for (const auto& v : variables) vars.push_back({{"name", v.name}, {"lower", v.lower}, {"upper", v.upper}});
    for (const auto& c : constraints) cons.push_back({{"name", c.name}, {"category", std::string(to_string(c.category))}});
    return {{"name", name},
            {"command", command},
            {"variables", vars},
            {"constraints", cons},
            {"timeout_seconds", timeout_seconds}};
}

namespace {

class ChildProcess {
public:
    explicit ChildProcess(ExternalDescriptor d) : desc_(std::move(d)) {}
    ~ChildProcess() { stop(); }

    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    Evaluation evaluate(const Eigen::VectorXd& x) {
        std::lock_guard lock(mutex_);
        try {
            if (pid_ <= 0) start();
            nlohmann::json request = {{"x", std::vector<double>(x.data(), x.data() + x.size())}};
            write_line(request.dump() + "\n");
            return parse(read_line());
        } catch (const std::exception& e) {
            stop();
            throw EvaluationError(0, e.what());
        }
    }

private:
    void start() {
        int to_child[2], from_child[2];
        if (pipe(to_child) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
        if (pipe(from_child) != 0) {
            close(to_child[0]);
            close(to_child[1]);
            throw Error(std::string("pipe: ") + std::strerror(errno));
        }
        std::vector<char*> argv;
        for (auto& a : desc_.command) argv.push_back(a.data());
        argv.push_back(nullptr);

        const pid_t pid = fork();
        if (pid < 0) throw Error(std::string("fork: ") + std::strerror(errno));
        if (pid == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            execvp(argv[0], argv.data());
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        fcntl(to_child[1], F_SETFD, FD_CLOEXEC);
        fcntl(from_child[0], F_SETFD, FD_CLOEXEC);
        pid_ = pid;
        in_ = to_child[1];
        out_ = from_child[0];
        buffer_.clear();
    }

    void stop() {
        if (in_ >= 0) close(in_);
        if (out_ >= 0) close(out_);
        in_ = out_ = -1;
        if (pid_ > 0) {
            int status = 0;
            if (waitpid(pid_, &status, WNOHANG) == 0) {
                kill(pid_, SIGKILL);
                waitpid(pid_, &status, 0);
            }
        }
        pid_ = -1;
        buffer_.clear();
    }

    std::string exit_description() {
        int status = 0;
        // give a child that just closed its output a moment to be reaped
        for (int i = 0; i < 50; ++i) {
            const pid_t r = waitpid(pid_, &status, WNOHANG);
            if (r == pid_) {
                pid_ = -1;
                if (WIFEXITED(status)) return "child exited with status " + std::to_string(WEXITSTATUS(status));
                if (WIFSIGNALED(status)) return "child killed by signal " + std::to_string(WTERMSIG(status));
                return "child terminated";
            }
            usleep(2000);
        }
        return "child closed its output";
    }

    void write_line(const std::string& line) {
        // a child that has already exited must not kill us with SIGPIPE
        static std::once_flag sigpipe_once;
        std::call_once(sigpipe_once, [] { std::signal(SIGPIPE, SIG_IGN); });
        std::size_t done = 0;
        while (done < line.size()) {
            const ssize_t n = ::write(in_, line.data() + done, line.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error("write to child failed: " + exit_description());
            }
            done += static_cast<std::size_t>(n);
        }
    }

    std::string read_line() {
        using clock = std::chrono::steady_clock;
        const auto deadline = clock::now() + std::chrono::duration<double>(desc_.timeout_seconds);
        for (;;) {
            if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
            if (left <= 0) throw Error("timeout after " + std::to_string(desc_.timeout_seconds) + " s");
            pollfd p{out_, POLLIN, 0};
            const int r = poll(&p, 1, static_cast<int>(left));
            if (r < 0) {
                if (errno == EINTR) continue;
                throw Error(std::string("poll: ") + std::strerror(errno));
            }
            if (r == 0) continue;
            char chunk[4096];
            const ssize_t n = ::read(out_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw Error(std::string("read: ") + std::strerror(errno));
            }
            if (n == 0) throw Error(exit_description());
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    Evaluation parse(const std::string& line) const {
        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw Error("malformed reply: " + line);
        }
        if (!reply.is_object() || !reply.contains("objective") || !reply["objective"].is_number())
            throw Error("reply has no numeric objective");
        Evaluation e;
        e.objective = reply["objective"].get<double>();
        if (reply.contains("constraints")) {
            const auto& c = reply["constraints"];
            if (!c.is_array()) throw Error("constraints must be an array");
            for (const auto& v : c) {
                if (!v.is_number()) throw Error("non-numeric constraint value");
                e.constraints.push_back(v.get<double>());
            }
        }
        if (e.constraints.size() != desc_.constraints.size())
            throw Error("expected " + std::to_string(desc_.constraints.size()) + " constraint values, got " +
                        std::to_string(e.constraints.size()));
        return e;
    }

    ExternalDescriptor desc_;
    std::mutex mutex_;
    pid_t pid_ = -1;
    int in_ = -1;
    int out_ = -1;
    std::string buffer_;
};

} // namespace

ProblemSpec external_blackbox(const ExternalDescriptor& descriptor) {
    validate_variables(descriptor.variables);
    auto child = std::make_shared<ChildProcess>(descriptor);
    ProblemSpec spec;
    spec.name = descriptor.name;
    spec.variables = descriptor.variables;
    spec.constraints = descriptor.constraints;
    spec.evaluate = [child](const Eigen::VectorXd& x) { return child->evaluate(x); };
    return spec;
}

} // namespace xferbo
