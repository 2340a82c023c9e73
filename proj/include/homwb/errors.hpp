#pragma once

#include <stdexcept>
#include <string>

namespace homwb {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument value (out of range, wrong sign, empty list, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Inputs are individually valid but mutually inconsistent
// (non-overlapping spans, mismatched binning, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Integration step too coarse for the requested dynamics.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Normalisation reference is zero or negative.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// Requested shift or window exceeds the available support.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed or incomplete input data (missing channel, bad record, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Configuration violates a documented modelling assumption.
class ModelValidityError : public Error {
 public:
  using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace homwb
