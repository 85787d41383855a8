#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qhm {

// Error categories double as CLI exit codes: 2-9 are input validation
// problems, 10+ are computation failures.
enum class ErrorCode : int {
  kAsymmetry = 2,
  kTriangle = 3,
  kDiagonal = 4,
  kNonPositive = 5,
  kParse = 6,
  kNonFinite = 7,
  kDimension = 8,
  kBadInput = 9,  // unknown fixture name, malformed descriptor
  kNotQuasihypermetric = 10,
  kInconsistentSystem = 11,
  kBudgetExceeded = 12,
  kPrecondition = 13,
  kDomain = 14,
  kContradiction = 15,
  kNegativeEnergy = 16,
  kNonMonotone = 17,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what),
        code_(code),
        module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

// Raised when a claimed property fails and the failure has a certificate,
// e.g. a mass-zero vector with positive energy.
class WitnessError : public Error {
 public:
  WitnessError(ErrorCode code, std::string module, const std::string& what,
               std::vector<double> witness)
      : Error(code, std::move(module), what), witness_(std::move(witness)) {}

  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  std::vector<double> witness_;
};

}  // namespace qhm
