#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

// Command-line drivers: spectrum, converge, evolve, su2-check, particle, report.
// Exit codes: 0 success, 1 I/O failure, 2 usage or contract error, 3 numerical failure.

namespace strobo::cli {

struct RunConfig {
    std::string command;
    // Effective parameters after merging the config file and flags, formatted
    // as they are echoed into every report.
    std::map<std::string, std::string> parameters;
    std::string format = "csv";
    std::string out;  // empty: standard output
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Parses "64,128,512" or a geometric run "64,128,...,4096".
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace strobo::cli
