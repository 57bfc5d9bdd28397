#pragma once

#include <string>
#include <vector>

namespace docprep::cli {

enum ExitCode : int {
    ok = 0,
    input_error = 1,
    ocr_failure = 2,
};

/// Parses argv (argv[0] is the program name) and runs the subcommand.
int parse_and_dispatch(int argc, const char* const* argv);
int parse_and_dispatch(const std::vector<std::string>& args);

} // namespace docprep::cli
