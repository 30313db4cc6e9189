#pragma once

#include <iosfwd>

namespace cradle {

// Exit codes shared by every subcommand.
namespace exit_code {
constexpr int kOk = 0;
constexpr int kUsage = 2;  // bad flags, bad config, unreadable or corrupt input
constexpr int kAgentFailure = 3;
constexpr int kVerificationFailure = 4;
}  // namespace exit_code

// Subcommands: run, record, replay, probe, codec, serve.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cradle
