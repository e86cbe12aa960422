#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cop {

enum class Errc {
  ChecksumMismatch,
  MalformedField,
  InvalidArmorCharacter,
  UnsupportedMessageType,
  TruncatedPayload,
  UnavailableKinematics,
  CoincidentPoints,
  InvalidGeofence,
  UnknownMmsi,
  NoReportBefore,
  NoGroundIntersection,
  InvalidBBox,
  InvalidFrame,
  DimensionMismatch,
  ZeroVector,
  NonFiniteEntry,
  UnknownFeatureId,
  TooFewPoints,
  InvalidConfig,
  StorageFailure,
  CorruptInputRecord,
  InvalidScenario,
  UnknownFence,
  InvalidArgument,
  Conflict,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code), message_(what) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace cop
