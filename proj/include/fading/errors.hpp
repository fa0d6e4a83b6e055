#pragma once

#include <stdexcept>
#include <string>

namespace fading {

// Base for every error raised by the library. The CLI maps ConfigError to
// exit status 2 and everything else to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside the domain of an operation (negative squeezing, NaN ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Transmittance moments that no distribution on [0,1]^2 can produce.
class ChannelError : public Error {
 public:
  using Error::Error;
};

// <T_a^2> = 0 or <T_b^2> = 0: the mode is completely lost.
class DegenerateChannelError : public ChannelError {
 public:
  using ChannelError::ChannelError;
};

// A specialised formula was called outside the regime it is valid in.
class MisuseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fading
