#pragma once

#include <stdexcept>
#include <string>

namespace specband {

//! Thrown when a configuration or argument violates a documented precondition
//! (bad dimensions, out-of-range parameters, unsupported measure/sampler pairings).
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

//! Thrown when a numerical routine fails or produces a non-finite result
//! (eigensolver failure, overflow, undefined statistic value).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

//! Thrown on file-system and serialization failures (missing config file,
//! unwritable output path, malformed config syntax).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specband
