#pragma once

#include <stdexcept>
#include <string>

namespace spxtrack {

/// Bad or inconsistent run configuration (unknown key, unparsable value).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Missing or malformed input data (files, directories, image payloads).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spxtrack
