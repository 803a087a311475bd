#pragma once

#include <stdexcept>
#include <string>

namespace momentbody {

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Centered Gram matrix numerically singular; the map does not satisfy the
// independence assumption and cannot be whitened.
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPreconditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingBlockStructure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlockViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A candidate separator failed re-verification in original coordinates.
struct NotASeparator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotUnit : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace momentbody
