#pragma once

#include <stdexcept>
#include <string>

namespace cradle {

// Base of every error the library throws. `code()` is the machine-readable
// identifier used on the wire and in CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& m) : Error("invalid_parameter", m) {}
};

struct CodebookCollision : Error {
    explicit CodebookCollision(const std::string& m) : Error("codebook_collision", m) {}
};

struct InvalidSymbol : Error {
    InvalidSymbol(char c, std::size_t position)
        : Error("invalid_symbol", "invalid symbol '" + std::string(1, c) + "' at position " +
                                      std::to_string(position)),
          symbol(c), position(position) {}
    char symbol;
    std::size_t position;
};

struct InvalidSubstance : Error {
    explicit InvalidSubstance(const std::string& m) : Error("invalid_substance", m) {}
};

// Carries the JSON path of the offending field, e.g. "schedule.durations[2]".
struct ConfigError : Error {
    ConfigError(std::string path, const std::string& m)
        : Error("config_error", path + ": " + m), path(std::move(path)) {}
    std::string path;
};

struct NoSession : Error {
    NoSession() : Error("no_session", "step called before reset") {}
};

struct ActionDecodeError : Error {
    explicit ActionDecodeError(const std::string& m) : Error("bad_action", m) {}
};

struct LogParseError : Error {
    LogParseError(std::size_t line, const std::string& m)
        : Error("parse_error", "line " + std::to_string(line) + ": " + m), line(line) {}
    std::size_t line;
};

struct ProbeConfigError : Error {
    explicit ProbeConfigError(const std::string& m) : Error("probe_config", m) {}
};

}  // namespace cradle
