#pragma once

// Newline-delimited JSON protocol, one session per connection.
//
//   server -> {"type":"hello","version":1,"schema":{...}}
//   client -> {"type":"reset","config":{...}}      server -> {"type":"obs","obs":{...}}
//   client -> {"type":"act","action":{...}}        server -> {"type":"obs","obs":{...}}
//   client -> {"type":"end"}                       server -> {"type":"end","reason":"client"}
//   any violation                                  server -> {"type":"error","code":...,"message":...}
//
// Error codes: bad_json, bad_message, no_session, config_error, bad_action.

#include <atomic>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "cradle/session.hpp"

namespace cradle {

constexpr int kProtocolVersion = 1;
constexpr const char* kEndpointEnv = "CRADLE_ENDPOINT";
constexpr const char* kDefaultEndpoint = "127.0.0.1:7878";

nlohmann::json hello_message();
nlohmann::json error_message(const std::string& code, const std::string& message);

// Protocol state of one connection.
class Connection {
public:
    // Returns the reply line (without newline). Sets `closing` after `end`.
    std::string handle(const std::string& line, bool& closing);
    bool has_session() const noexcept { return session_.live(); }

private:
    Session session_;
};

// Set from a signal handler; servers notice it within ~100 ms.
std::atomic<bool>& shutdown_flag();
void install_signal_handlers();

// Serves a single session over two file descriptors until EOF, `end` or shutdown.
void serve_fd(int in_fd, int out_fd);

struct Endpoint {
    std::string host;
    int port = 0;
};
// Accepts "HOST:PORT" or ":PORT"; nullopt when malformed.
std::optional<Endpoint> parse_endpoint(const std::string& text);

// Binds, prints "listening HOST:PORT" to `announce`, serves until shutdown.
// Returns 0 on clean shutdown, 2 when the endpoint cannot be bound.
int serve_tcp(const Endpoint& endpoint, std::ostream& announce, std::ostream& err);

}  // namespace cradle
