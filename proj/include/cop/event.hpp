#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cop/geo.hpp"
#include "json.hpp"

namespace cop {

enum class EventKind {
  Appearance,
  Disappearance,
  OffCourse,
  Colocation,
  GeofenceEnter,
  GeofenceExit,
  GeofenceProjectedEnter,
  DarkVessel,
  VesselVerified,
  VesselMismatch,
  Meeting,
  Gathering,
  CountAnomaly,
};

enum class EventSource { AIS, FMV, FUSION, ANALYTICS };

std::string_view to_string(EventKind kind);
std::string_view to_string(EventSource source);
std::optional<EventKind> parse_event_kind(std::string_view name);
std::optional<EventSource> parse_event_source(std::string_view name);

/// One entry of the events log. `id` is assigned by the log on append; engines
/// emit events with id 0.
struct Event {
  std::uint64_t id = 0;
  EventKind kind = EventKind::Appearance;
  double timestamp = 0.0;
  std::optional<geo::GeoPoint> location;
  std::vector<std::string> subjects;
  nlohmann::json details = nlohmann::json::object();
  EventSource source = EventSource::AIS;
};

Event make_event(EventKind kind, EventSource source, double timestamp,
                 std::optional<geo::GeoPoint> location, std::vector<std::string> subjects,
                 nlohmann::json details = nlohmann::json::object());

}  // namespace cop
