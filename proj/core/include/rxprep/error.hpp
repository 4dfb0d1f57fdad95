#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rxprep {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedFormat,
  ColorImageRejected,
  CorruptFile,
  IoFailure,
  DimensionMismatch,
  BadMagic,
  TruncatedFile,
  NonFiniteValue,
  MissingSidecar,
  EmptyMask,
  TileTooSmall,
  DegenerateBox,
  IdMismatch,
  NoInstances,
  OneClassOnly,
  SchemaError,
  UnknownImageId,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-readable kind so the
// batch front end can record it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rxprep
