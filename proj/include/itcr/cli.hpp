#ifndef ITCR_CLI_HPP
#define ITCR_CLI_HPP

#include <iosfwd>

namespace itcr {

// Exit codes: 0 success, 1 validation failure, 2 runtime/numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the `itcr` tool; streams are injectable for tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace itcr

#endif // ITCR_CLI_HPP
