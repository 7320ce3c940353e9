#ifndef SFLOW_ERRORS_HPP
#define SFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sflow {

// Exit code mapping used by the CLI:
//   ConfigError -> 1, DataError (and subclasses) -> 2, NumericalError -> 3.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unsupported on-disk content (bad PNG, wrong bit depth, ...).
struct FormatError : DataError {
  explicit FormatError(const std::string& msg) : DataError(msg) {}
};

// Mismatched raster dimensions between operands.
struct ShapeError : DataError {
  explicit ShapeError(const std::string& msg) : DataError(msg) {}
};

// Inputs outside an operation's domain (d <= 0, rho out of range, ...).
struct DomainError : DataError {
  explicit DomainError(const std::string& msg) : DataError(msg) {}
};

// No usable data: empty seed set, fully invalid map, empty report list.
struct NoDataError : DataError {
  explicit NoDataError(const std::string& msg) : DataError(msg) {}
};

struct IoError : DataError {
  explicit IoError(const std::string& msg) : DataError(msg) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sflow

#endif
