#pragma once

#include <stdexcept>
#include <string>

namespace sparsify {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid size is not a multiple of the leaf width (or the tiling is too coarse).
class IndivisibleGrid : public Error {
 public:
  using Error::Error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

/// Some Fourier mode sits within the gap floor of the shift s.
class ShiftResonant : public Error {
 public:
  using Error::Error;
};

class InvalidMedia : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix of a least-squares stencil fit vanished numerically.
class DegenerateGram : public Error {
 public:
  using Error::Error;
};

/// A front pivot column collapsed during restricted-pivoting elimination.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsify
