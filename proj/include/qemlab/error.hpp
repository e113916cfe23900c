#pragma once

#include <stdexcept>
#include <string>

namespace qem {

// Raised for malformed inputs, broken invariants and file-format problems.
// The CLI maps this to exit code 3; genuine usage errors exit with 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qem
