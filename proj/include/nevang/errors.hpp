#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nevang {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad grammar, bad dimensions, bad parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : InputError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Input violates a structural hypothesis (Q∘f ≡ 0, W ≡ 0, proportional pair, ...).
class DegenerateError : public InputError {
 public:
  using InputError::InputError;
};

// A numerical procedure could not reach the requested precision.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Magnitudes left the representable range even in scaled form.
class OverflowError : public NumericalError {
 public:
  OverflowError(const std::string& what, double log10_magnitude)
      : NumericalError(what + " (|value| ~ 1e" + std::to_string(static_cast<long long>(log10_magnitude)) + ")"),
        log10_magnitude_(log10_magnitude) {}
  double log10_magnitude() const noexcept { return log10_magnitude_; }

 private:
  double log10_magnitude_;
};

// An integration contour passes (numerically) through a zero of the integrand's
// denominator; the caller should displace the contour and retry.
class ContourError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nevang
