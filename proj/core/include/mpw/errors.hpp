#pragma once

#include <stdexcept>
#include <string>

namespace mpw {

// Bad user-facing input: out-of-range parameters, malformed specs, misuse of
// an API precondition the caller controls.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A state vector (or weight list) that should be normalized is not.
class NormalizationError : public std::invalid_argument {
 public:
  explicit NormalizationError(const std::string& what) : std::invalid_argument(what) {}
};

// An internal consistency check failed: a restricted basis was not closed
// under the Hamiltonian, a density matrix violated positivity beyond
// roundoff, a file being resumed does not match the run that produced it.
class IntegrityError : public std::runtime_error {
 public:
  explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

// The request is well-formed but exceeds what this build is willing to
// allocate or densify.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpw
