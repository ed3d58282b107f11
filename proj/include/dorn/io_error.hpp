#pragma once

#include <stdexcept>
#include <string>

namespace dorn {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File was readable but its contents are malformed.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace dorn
