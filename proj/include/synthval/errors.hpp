#pragma once

#include <stdexcept>
#include <string>

namespace synthval {

// Thrown for malformed input files, schema mismatches and violated
// operation preconditions. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace synthval
