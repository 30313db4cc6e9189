#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "cradle/server.hpp"

using namespace cradle;
using nlohmann::json;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string golden(const std::string& name) { return std::string(CRADLE_GOLDEN_DIR) + "/" + name; }

std::vector<std::string> run_in_process(const std::vector<std::string>& input) {
    Connection conn;
    std::vector<std::string> out{hello_message().dump()};
    for (const auto& line : input) {
        bool closing = false;
        out.push_back(conn.handle(line, closing));
        if (closing) break;
    }
    return out;
}

std::string run_command(const std::string& cmd) {
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    ::pclose(p);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

}  // namespace

TEST_CASE("golden transcripts in process") {
    for (const char* name : {"handshake", "errors"}) {
        CAPTURE(name);
        const auto expected = read_lines(golden(std::string(name) + ".out"));
        CHECK(run_in_process(read_lines(golden(std::string(name) + ".in"))) == expected);
    }
}

TEST_CASE("golden transcripts over stdio") {
    for (const char* name : {"handshake", "errors"}) {
        CAPTURE(name);
        const std::string out =
            run_command(std::string(CRADLE_CLI) + " serve --stdio < " + golden(std::string(name) + ".in"));
        CHECK(out == join(read_lines(golden(std::string(name) + ".out"))));
    }
}

TEST_CASE("handshake transcript content") {
    const auto lines = read_lines(golden("handshake.out"));
    REQUIRE(lines.size() == 6);
    const json hello = json::parse(lines[0]);
    CHECK(hello["type"] == "hello");
    CHECK(hello["version"] == 1);
    CHECK(hello["schema"] == observation_schema());

    // Same as a direct session with the same config.
    SessionConfig c;
    c.seed = 7;
    Session s(c);
    CHECK(json::parse(lines[1])["obs"] == observation_to_json(s.reset()));
    CHECK(json::parse(lines[2])["obs"] == observation_to_json(s.step({})));
    const json o3 = json::parse(lines[3])["obs"];
    CHECK(o3["t"] == 2);
    CHECK(o3["proprio"]["gaze"] == doctest::Approx(0.1));
    const json o4 = json::parse(lines[4])["obs"];
    bool clamped = false, investigate = false;
    for (const auto& e : o4["events"]) {
        clamped |= e["tag"] == "action_clamped";
        investigate |= e["tag"] == "investigate" && e["detail"] == "cry";
    }
    CHECK(clamped);
    CHECK(investigate);
    CHECK(json::parse(lines[5]) == json{{"type", "end"}, {"reason", "client"}});
}

TEST_CASE("error codes") {
    const auto lines = read_lines(golden("errors.out"));
    std::vector<std::string> codes;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const json j = json::parse(lines[i]);
        codes.push_back(j["type"] == "error" ? j["code"].get<std::string>() : j["type"].get<std::string>());
    }
    CHECK(codes == std::vector<std::string>{"no_session", "bad_json", "bad_message", "bad_message", "config_error",
                                            "config_error", "obs", "bad_action", "bad_action", "end"});
}

TEST_CASE("errors keep the session") {
    Connection conn;
    bool closing = false;
    conn.handle(R"({"type":"reset"})", closing);
    CHECK(conn.has_session());
    conn.handle(R"({"type":"act","action":{}})", closing);
    CHECK(json::parse(conn.handle("nonsense", closing))["code"] == "bad_json");
    CHECK(json::parse(conn.handle(R"({"type":"act","action":{"vocal":7}})", closing))["code"] == "bad_action");
    CHECK(json::parse(conn.handle(R"({"type":"reset","config":{"seed":"x"}})", closing))["code"] == "config_error");
    CHECK_FALSE(closing);
    const json obs = json::parse(conn.handle(R"({"type":"act","action":{}})", closing));
    CHECK(obs["obs"]["t"] == 2);
    // A null config means defaults.
    CHECK(json::parse(conn.handle(R"({"type":"reset","config":null})", closing))["obs"]["t"] == 0);
}

TEST_CASE("record_path is ignored on the wire") {
    const std::string path = "wire-should-not-write.log";
    std::remove(path.c_str());
    Connection conn;
    bool closing = false;
    const json r = json::parse(conn.handle(json{{"type", "reset"}, {"config", {{"record_path", path}}}}.dump(), closing));
    CHECK(r["type"] == "obs");
    conn.handle(R"({"type":"act","action":{}})", closing);
    CHECK_FALSE(std::ifstream(path).good());
}

TEST_CASE("parse_endpoint") {
    auto e = parse_endpoint("127.0.0.1:7878");
    REQUIRE(e);
    CHECK(e->host == "127.0.0.1");
    CHECK(e->port == 7878);
    e = parse_endpoint(":0");
    REQUIRE(e);
    CHECK(e->host == "127.0.0.1");
    CHECK(e->port == 0);
    CHECK_FALSE(parse_endpoint("localhost"));
    CHECK_FALSE(parse_endpoint("host:"));
    CHECK_FALSE(parse_endpoint("host:99999"));
    CHECK_FALSE(parse_endpoint("host:12a"));
}

TEST_CASE("tcp sessions are independent") {
    std::ostringstream err;
    std::string announced;
    // Bind to an ephemeral port and learn it from the announcement.
    struct Announce : std::stringbuf {
        std::string* target;
        int sync() override {
            *target = str();
            return 0;
        }
    } buf;
    buf.target = &announced;
    std::ostream announce(&buf);
    shutdown_flag().store(false);
    int rc = -1;
    std::thread server([&] { rc = serve_tcp(Endpoint{"127.0.0.1", 0}, announce, err); });
    for (int i = 0; i < 200 && announced.empty(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    REQUIRE(announced.rfind("listening 127.0.0.1:", 0) == 0);
    const int port = std::stoi(announced.substr(announced.rfind(':') + 1));

    auto open = [&] {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(static_cast<std::uint16_t>(port));
        ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
        return fd;
    };
    auto exchange = [](int fd, const std::string& send, int replies) {
        if (!send.empty()) REQUIRE(::write(fd, send.data(), send.size()) == static_cast<ssize_t>(send.size()));
        std::string got;
        char c;
        while (replies > 0 && ::read(fd, &c, 1) == 1) {
            if (c == '\n') --replies;
            got.push_back(c);
        }
        return got;
    };

    const auto input = read_lines(golden("handshake.in"));
    const int a = open();
    const int b = open();
    const std::string out_a = exchange(a, join(input), 6);
    const std::string hello_b = exchange(b, "", 1);
    CHECK(out_a == join(read_lines(golden("handshake.out"))));
    CHECK(json::parse(hello_b)["type"] == "hello");
    // b has its own session: act before reset is an error there.
    const json e = json::parse(exchange(b, "{\"type\":\"act\",\"action\":{}}\n", 1));
    CHECK(e["code"] == "no_session");

    shutdown_flag().store(true);
    const json bye = json::parse(exchange(b, "", 1));
    CHECK(bye == json{{"type", "end"}, {"reason", "shutdown"}});
    ::close(a);
    ::close(b);
    server.join();
    CHECK(rc == 0);
    shutdown_flag().store(false);

    // Double bind on a port someone else holds.
    const int holder = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::bind(holder, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    ::listen(holder, 1);
    socklen_t len = sizeof addr;
    ::getsockname(holder, reinterpret_cast<sockaddr*>(&addr), &len);
    std::ostringstream sink;
    CHECK(serve_tcp(Endpoint{"127.0.0.1", ntohs(addr.sin_port)}, sink, err) == 2);
    CHECK(err.str().find("cannot bind") != std::string::npos);
    ::close(holder);
}
