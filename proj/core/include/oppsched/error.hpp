#pragma once

#include <stdexcept>
#include <string>

namespace oppsched {

// Malformed or out-of-contract input. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative solver hit its iteration cap before certifying its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_gap, long iterations);

  double last_gap() const noexcept { return last_gap_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_gap_;
  long iterations_;
};

// A finite enumeration would exceed its configured cap.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace oppsched
