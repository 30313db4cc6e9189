#include "cradle/server.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <ostream>
#include <thread>
#include <vector>

#include "cradle/error.hpp"

namespace cradle {

using nlohmann::json;

json hello_message() {
    return {{"type", "hello"}, {"version", kProtocolVersion}, {"schema", observation_schema()}};
}

json error_message(const std::string& code, const std::string& message) {
    return {{"type", "error"}, {"code", code}, {"message", message}};
}

std::string Connection::handle(const std::string& line, bool& closing) {
    closing = false;
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_message("bad_json", e.what()).dump();
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
        return error_message("bad_message", "message must be an object with a string \"type\"").dump();
    const std::string type = msg["type"].get<std::string>();
    try {
        if (type == "reset") {
            const json cfg = msg.contains("config") ? msg["config"] : json::object();
            SessionConfig config = config_from_json(cfg.is_null() ? json::object() : cfg);
            config.record_path.reset();  // clients cannot make the server write files
            const ObservationFrame obs = session_.reset(std::move(config));
            return json{{"type", "obs"}, {"obs", observation_to_json(obs)}}.dump();
        }
        if (type == "act") {
            if (!session_.live()) return error_message("no_session", "act before reset").dump();
            if (!msg.contains("action")) return error_message("bad_action", "missing \"action\"").dump();
            return json{{"type", "obs"}, {"obs", session_.step_json(msg["action"])}}.dump();
        }
        if (type == "end") {
            closing = true;
            return json{{"type", "end"}, {"reason", "client"}}.dump();
        }
    } catch (const Error& e) {
        return error_message(e.code(), e.what()).dump();
    }
    return error_message("bad_message", "unknown message type \"" + type + "\"").dump();
}

namespace {

std::atomic<bool> g_shutdown{false};

extern "C" void on_signal(int) { g_shutdown.store(true); }

bool write_all(int fd, const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

bool send_line(int fd, const json& j) { return write_all(fd, j.dump() + "\n"); }

}  // namespace

std::atomic<bool>& shutdown_flag() { return g_shutdown; }

void install_signal_handlers() {
    struct sigaction sa {};
    sa.sa_handler = on_signal;
    sigemptyset(&sa.sa_mask);
    sa.sa_flags = 0;
    sigaction(SIGINT, &sa, nullptr);
    sigaction(SIGTERM, &sa, nullptr);
    std::signal(SIGPIPE, SIG_IGN);
}

void serve_fd(int in_fd, int out_fd) {
    Connection conn;
    if (!send_line(out_fd, hello_message())) return;
    std::string buffer;
    char chunk[4096];
    bool eof = false;
    while (true) {
        // Complete lines already received are answered even during shutdown.
        std::size_t nl;
        while ((nl = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            bool closing = false;
            if (!write_all(out_fd, conn.handle(line, closing) + "\n") || closing) return;
        }
        if (eof) return;
        if (g_shutdown.load()) {
            send_line(out_fd, {{"type", "end"}, {"reason", "shutdown"}});
            return;
        }
        pollfd p{in_fd, POLLIN, 0};
        const int r = ::poll(&p, 1, 100);
        if (r < 0 && errno != EINTR) return;
        if (r <= 0) continue;
        const ssize_t n = ::read(in_fd, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            return;
        }
        if (n == 0) {
            eof = true;
            if (!buffer.empty()) buffer.push_back('\n');
            continue;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
    }
}

std::optional<Endpoint> parse_endpoint(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) return std::nullopt;
    Endpoint ep;
    ep.host = colon == 0 ? "127.0.0.1" : text.substr(0, colon);
    const std::string port = text.substr(colon + 1);
    if (port.empty() || port.size() > 5 || port.find_first_not_of("0123456789") != std::string::npos)
        return std::nullopt;
    ep.port = std::stoi(port);
    if (ep.port > 65535) return std::nullopt;
    return ep;
}

int serve_tcp(const Endpoint& endpoint, std::ostream& announce, std::ostream& err) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) {
        err << "error: socket: " << std::strerror(errno) << '\n';
        return 2;
    }
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(endpoint.port));
    if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1) {
        err << "error: cannot bind " << endpoint.host << ':' << endpoint.port << ": not an IPv4 address\n";
        ::close(fd);
        return 2;
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 16) < 0) {
        err << "error: cannot bind " << endpoint.host << ':' << endpoint.port << ": " << std::strerror(errno) << '\n';
        ::close(fd);
        return 2;
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    announce << "listening " << endpoint.host << ':' << ntohs(addr.sin_port) << std::endl;

    std::vector<std::thread> workers;
    while (!g_shutdown.load()) {
        pollfd p{fd, POLLIN, 0};
        const int r = ::poll(&p, 1, 100);
        if (r <= 0) continue;
        const int client = ::accept(fd, nullptr, nullptr);
        if (client < 0) continue;
        workers.emplace_back([client] {
            serve_fd(client, client);
            ::shutdown(client, SHUT_RDWR);
            ::close(client);
        });
    }
    ::close(fd);
    for (auto& w : workers) w.join();
    return 0;
}

}  // namespace cradle
