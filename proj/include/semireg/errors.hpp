#ifndef SEMIREG_ERRORS_HPP
#define SEMIREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace semireg {

/// Operands of incompatible dimension were combined.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A recursion denominator vanished (|1 - alpha_k - beta_k*omega_{k-1}| too small).
class NumericalDegeneracy : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters violate an algorithm precondition (e.g. tau below its admissibility threshold).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A driver safety cap (level or iteration count) was exceeded.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace semireg

#endif  // SEMIREG_ERRORS_HPP
