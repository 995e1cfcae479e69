#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

/// Bad input or arguments. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One rejected line of a line-delimited input file.
struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;

  bool operator==(const LineIssue&) const = default;
};

inline std::string to_string(const LineIssue& issue) {
  return "line " + std::to_string(issue.line) + ": " + issue.message;
}

}  // namespace forge
