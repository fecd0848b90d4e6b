#include "oppsched/error.hpp"

namespace oppsched {

ConvergenceError::ConvergenceError(const std::string& what, double last_gap,
                                   long iterations)
    : std::runtime_error(what + " (last gap " + std::to_string(last_gap) +
                         " after " + std::to_string(iterations) +
                         " iterations)"),
      last_gap_(last_gap),
      iterations_(iterations) {}

}  // namespace oppsched
