#include "evmine/error.hpp"

namespace evmine {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::BoxOutOfBounds: return "BoxOutOfBounds";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::TooManyClusters: return "TooManyClusters";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NegativeAlpha: return "NegativeAlpha";
    case ErrorKind::EmptyEvidence: return "EmptyEvidence";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::HttpError: return "HttpError";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
    case ErrorKind::EmptyDirectory: return "EmptyDirectory";
    case ErrorKind::RegionOutOfBounds: return "RegionOutOfBounds";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace evmine
