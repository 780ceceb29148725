#pragma once

#include <stdexcept>
#include <string>

namespace whisker {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfig = 2,
  kPhysics = 3,
  kDivergence = 4,
  kData = 5,
};

// Bad user input: malformed config, empty grids, out-of-range options.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid physical parameters or evaluation outside the model's domain.
class PhysicsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Data-level failures: degenerate windows, class-count mismatches, bad CSV.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace whisker
