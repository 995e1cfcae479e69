#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace forge::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kCorpusFormatVersion = 1;
inline constexpr int kDatasetFormatVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs `forge <args...>` (args excludes the program name). Diagnostics and
/// the resolved configuration go to `err`; `out` only receives --help and
/// --version text. Data is written to files named by flags.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace forge::cli
