#include "rarephen/error.hpp"

namespace rarephen {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kEmptyInput: return "empty input";
    case ErrorKind::kSingleClass: return "single-class labels";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kOffsetMismatch: return "offset mismatch";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kCorruptFile: return "corrupt file";
    case ErrorKind::kVersionMismatch: return "version mismatch";
    case ErrorKind::kTransport: return "transport error";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

}  // namespace rarephen
