#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace asep {

/// Exit codes of the command line.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. args excludes the program name, e.g. {"sample", "--ring", "4", ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat key=value manifest. "argv" holds the full argument list separated by
/// single spaces; rerunning it reproduces the output.
struct Manifest {
    std::map<std::string, std::string> entries;
    std::string serialize() const;
    static Manifest parse(const std::string& text);
    std::vector<std::string> argv() const;
};

}  // namespace asep
