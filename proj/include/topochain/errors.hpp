#pragma once

#include <stdexcept>

namespace topochain {

// Invalid run configuration or arguments.  The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical contract was violated: non-Hermitian input, gap closure on a
// grid, norm drift, ensemble sample failure.  CLI exit code 3.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure.  CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace topochain
