#pragma once

#include <stdexcept>
#include <string>

namespace sae {

// Input/config problems (bad files, schema mismatch, invalid arguments).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Failures of the estimation machinery itself.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A robust scale came out as zero; calibration divides by it.
class ZeroScaleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace sae
