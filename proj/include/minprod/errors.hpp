#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minprod {

// Base for all library errors. Subclasses mark the failure modes that callers
// are expected to branch on; everything else surfaces as Error directly.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A value is provably within the configured width of an integer boundary but
// the side cannot be decided (undeclared relation between generators).
struct PrecisionExhausted : Error {
  using Error::Error;
};

// Interval refinement hit the budget width without excluding zero.
struct RefinementBudgetExceeded : Error {
  using Error::Error;
};

// An orbit computation needs marked-orbit indices beyond the window.
struct WindowOverflow : Error {
  using Error::Error;
};

// A quotient precondition P∘ι = ι∘P failed; message carries the witness.
struct EquivarianceViolation : Error {
  using Error::Error;
};

// Two discs of a family overlap; indices are in the message and fields.
struct DisjointnessViolation : Error {
  DisjointnessViolation(const std::string& msg, long m, long n)
      : Error(msg), index_a(m), index_b(n) {}
  long index_a, index_b;
};

// A cocycle perturbation could not be realized (no orbit return in the
// horizon, bump supports collide, or the base is unsupported).
struct ConstructionFailure : Error {
  using Error::Error;
};

// A product certificate was asked about a factor that is not itself minimal;
// carries the factor's index and its integer relation witness.
struct FactorNotMinimal : Error {
  FactorNotMinimal(const std::string& msg, int factor, std::vector<std::string> w)
      : Error(msg), factor_index(factor), witness(std::move(w)) {}
  int factor_index;
  std::vector<std::string> witness;
};

// Malformed configuration or CLI input.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace minprod
