#pragma once

#include <stdexcept>
#include <string>

namespace lcone {

/// Malformed value: zero normal, nonpositive Dikin center, non-symmetric
/// matrix where symmetry is required, and the like.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Dimension outside an operation's domain (n < 2, index out of range,
/// mismatched sizes).
struct dimension_error : invalid_input {
  using invalid_input::invalid_input;
};

/// A stated precondition does not hold for otherwise well-formed inputs
/// (plane not through the center, point not a member, kernel residual too
/// large, wrong inertia).
struct precondition_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// Computation produced or would produce non-finite values.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lcone
