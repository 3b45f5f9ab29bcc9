#pragma once

#include <stdexcept>
#include <string>

namespace susycs {

enum class ErrorKind {
  NullOperator,        // all k_i zero
  WrongRegion,         // constructor called outside its parameter region
  NoEigenstate,        // recursion has no solution for the given free parameters
  Nilpotent,           // chi+ = chi- = 0, no coherent-form eigenstate
  TruncationOverflow,  // Fock truncation would exceed the cap
  ZeroNorm,            // <Z|Z> vanishes
  NoDivergence,        // divergence fit requested in a bounded region
  InvalidArgument,     // precondition on a plain argument
};

const char* to_string(ErrorKind kind) noexcept;

/// Numerical or domain failure raised by the library. The CLI maps these to
/// exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace susycs
