// Error taxonomy shared by all qpfc modules.
#pragma once

#include <stdexcept>
#include <string>

namespace qpfc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An input violates a documented precondition (bad grid size, rational
// frequency where an irrational one is required, map not periodic in r, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A numerical solve failed (divergent iteration, perturbation outside the
// contraction box, ...). The CLI maps these to the convergence-failure exit.
class SolverError : public Error {
 public:
  using Error::Error;
};

// A small divisor at or below the resonance floor.
class ResonanceError : public SolverError {
 public:
  using SolverError::SolverError;
};

// The linearized factor a(theta) = 1 + eps*F_r left [1/2, 3/2].
class EpsilonTooLargeError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace qpfc
