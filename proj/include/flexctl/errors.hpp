#pragma once

#include <stdexcept>
#include <string>

namespace flexctl {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truncated series hit max_terms while the last term was still above tol.
class SeriesNonConvergence : public Error {
 public:
  using Error::Error;
};

// A sampling period below the configured floor eps_h.
class SamplingTooSmall : public Error {
 public:
  using Error::Error;
};

// Invalid parameters, gains, schedule or configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace flexctl
