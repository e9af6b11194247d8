#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace threepc {

/// Process exit codes shared by both executables.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;            ///< bad flags, bad config, bind failure
inline constexpr int parse = 2;            ///< unreadable or malformed plan/potfile/corpus
inline constexpr int not_cracked = 3;      ///< honest result without the target
inline constexpr int foul_play = 4;        ///< proof of work, spot-check or forgery failure
inline constexpr int connection = 5;       ///< server unreachable or connection lost
inline constexpr int protocol = 6;         ///< server broke the message contract
inline constexpr int server_error = 7;     ///< server answered with ErrorReply
inline constexpr int plan_refused = 8;     ///< no smooth value within tolerance, or duplicate plan
} // namespace exit_code

/// threepc-client without the program name: plan, genv, hitmask, run, verify, session.
int client_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// threepc-server without the program name. Runs until SIGINT or SIGTERM.
int server_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace threepc
