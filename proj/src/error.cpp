#include "cop/error.hpp"

namespace cop {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::MalformedField: return "MalformedField";
    case Errc::InvalidArmorCharacter: return "InvalidArmorCharacter";
    case Errc::UnsupportedMessageType: return "UnsupportedMessageType";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::UnavailableKinematics: return "UnavailableKinematics";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::InvalidGeofence: return "InvalidGeofence";
    case Errc::UnknownMmsi: return "UnknownMmsi";
    case Errc::NoReportBefore: return "NoReportBefore";
    case Errc::NoGroundIntersection: return "NoGroundIntersection";
    case Errc::InvalidBBox: return "InvalidBBox";
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NonFiniteEntry: return "NonFiniteEntry";
    case Errc::UnknownFeatureId: return "UnknownFeatureId";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::CorruptInputRecord: return "CorruptInputRecord";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::UnknownFence: return "UnknownFence";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Conflict: return "Conflict";
  }
  return "Unknown";
}

}  // namespace cop
