#include "cop/event.hpp"

#include <array>
#include <utility>

namespace cop {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 13> kKindNames{{
    {EventKind::Appearance, "Appearance"},
    {EventKind::Disappearance, "Disappearance"},
    {EventKind::OffCourse, "OffCourse"},
    {EventKind::Colocation, "Colocation"},
    {EventKind::GeofenceEnter, "GeofenceEnter"},
    {EventKind::GeofenceExit, "GeofenceExit"},
    {EventKind::GeofenceProjectedEnter, "GeofenceProjectedEnter"},
    {EventKind::DarkVessel, "DarkVessel"},
    {EventKind::VesselVerified, "VesselVerified"},
    {EventKind::VesselMismatch, "VesselMismatch"},
    {EventKind::Meeting, "Meeting"},
    {EventKind::Gathering, "Gathering"},
    {EventKind::CountAnomaly, "CountAnomaly"},
}};

constexpr std::array<std::pair<EventSource, std::string_view>, 4> kSourceNames{{
    {EventSource::AIS, "AIS"},
    {EventSource::FMV, "FMV"},
    {EventSource::FUSION, "FUSION"},
    {EventSource::ANALYTICS, "ANALYTICS"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "Unknown";
}

std::string_view to_string(EventSource source) {
  for (const auto& [s, name] : kSourceNames)
    if (s == source) return name;
  return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

std::optional<EventSource> parse_event_source(std::string_view name) {
  for (const auto& [s, n] : kSourceNames)
    if (n == name) return s;
  return std::nullopt;
}

Event make_event(EventKind kind, EventSource source, double timestamp,
                 std::optional<geo::GeoPoint> location, std::vector<std::string> subjects,
                 nlohmann::json details) {
  Event e;
  e.kind = kind;
  e.source = source;
  e.timestamp = timestamp;
  e.location = location;
  e.subjects = std::move(subjects);
  e.details = std::move(details);
  return e;
}

}  // namespace cop
