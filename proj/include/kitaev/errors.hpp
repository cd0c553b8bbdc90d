#pragma once

#include <stdexcept>
#include <string>

namespace kitaev {

/// Raised when a numerical routine fails (eigensolver non-convergence,
/// a state annihilated by truncation, a non-orthogonal rotation matrix).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

/// Raised when a tensor-chain bond would grow past the configured cap.
class BondOverflowError : public NumericalError {
  public:
    explicit BondOverflowError(const std::string &what) : NumericalError(what) {}
};

/// Raised when a dense object (Fock vector, contraction) would exceed its budget.
class BudgetError : public std::length_error {
  public:
    explicit BudgetError(const std::string &what) : std::length_error(what) {}
};

} // namespace kitaev
