#pragma once

#include <stdexcept>
#include <string>

namespace mdmd {

// Invalid parameters: non-power-of-two grids, level counts out of range,
// weights outside [0, 2], ...
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed containers: inconsistent block lengths, too few snapshots,
// missing row blocks.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data carrying no usable information (all-zero singular spectrum).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite field after a time step.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace mdmd
