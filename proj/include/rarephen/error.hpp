#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rarephen {

enum class ErrorKind {
  kParse,              // malformed input file or record
  kInvalidArgument,    // precondition violated by the caller
  kEmptyInput,         // a stage produced nothing to work on
  kSingleClass,        // training labels contain one class only
  kDimensionMismatch,  // vector length disagrees with the expected dimension
  kOffsetMismatch,     // token offsets do not fit the text they index
  kDivergence,         // training produced a non-finite loss
  kCorruptFile,        // persisted artifact is truncated or unreadable
  kVersionMismatch,    // persisted artifact has an unsupported version
  kTransport,          // embedding service unreachable or returned an error
  kProtocol,           // embedding service reply does not follow the wire format
  kIo,                 // file system failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rarephen
