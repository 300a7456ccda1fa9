#include "rstreg/error.hpp"

namespace rstreg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::MalformedHeader: return "malformed-header";
    case ErrorKind::TruncatedData: return "truncated-data";
    case ErrorKind::ZeroDimensions: return "zero-dimensions";
    case ErrorKind::UnsupportedFormat: return "unsupported-format";
    case ErrorKind::DegenerateRange: return "degenerate-range";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::DegenerateSize: return "degenerate-size";
    case ErrorKind::BlankImage: return "blank-image";
    case ErrorKind::NoSignal: return "no-signal";
    case ErrorKind::ContentOverflow: return "content-overflow";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace rstreg
