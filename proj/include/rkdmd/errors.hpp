#ifndef RKDMD_ERRORS_HPP
#define RKDMD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rkdmd {

// Error categories map onto CLI exit codes: config = 2, numerical = 3,
// capacity = 4.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rkdmd

#endif  // RKDMD_ERRORS_HPP
