#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treepca {

// Base for every error raised by the library.
class TreeSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors caused by malformed or inconsistent input data (as opposed to
// misuse of the API). The CLI maps these to exit code 2.
class DataError : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class IncompatibleSplits : public DataError {
 public:
  using DataError::DataError;
};

class NonPositiveLength : public DataError {
 public:
  using DataError::DataError;
};

class DuplicateSplit : public DataError {
 public:
  using DataError::DataError;
};

class InvalidLeafSet : public DataError {
 public:
  using DataError::DataError;
};

class NewickSyntaxError : public DataError {
 public:
  NewickSyntaxError(const std::string& what, std::size_t position)
      : DataError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownRootLabel : public DataError {
 public:
  using DataError::DataError;
};

class DuplicateTaxon : public DataError {
 public:
  using DataError::DataError;
};

class MissingLength : public DataError {
 public:
  using DataError::DataError;
};

class LeafSetMismatch : public DataError {
 public:
  using DataError::DataError;
};

class ParameterOutOfRange : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class NotFullyResolved : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class EmptySample : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class UnsupportedOrder : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class EmptyData : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class InsufficientData : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class InvalidEdge : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

class InvalidGraft : public TreeSpaceError {
 public:
  using TreeSpaceError::TreeSpaceError;
};

}  // namespace treepca
