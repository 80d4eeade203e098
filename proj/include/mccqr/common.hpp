#pragma once

#include <stdexcept>

namespace mccqr {

// Error taxonomy. The C API maps these onto status codes and the CLI onto
// exit codes, so every throw site picks the category deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally bad call: shape mismatch, out-of-range parameter.
struct InvalidArgument : Error {
  using Error::Error;
};

// Malformed input data; message carries row/column diagnostics when known.
struct DataError : Error {
  using Error::Error;
};

// Computation failed numerically (non-finite loss, rank deficiency).
struct NumericError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace mccqr
