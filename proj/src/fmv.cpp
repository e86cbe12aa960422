#include "cop/fmv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "cop/error.hpp"

namespace cop::fmv {

using geo::deg2rad;

void validate(const FrameMeta& frame) {
  if (frame.frame_id.empty()) throw Error(Errc::InvalidFrame, "empty frame_id");
  if (!(frame.altitude_agl > 0)) throw Error(Errc::InvalidFrame, "altitude_agl must be > 0");
  if (!(frame.hfov > 0 && frame.hfov < 180 && frame.vfov > 0 && frame.vfov < 180))
    throw Error(Errc::InvalidFrame, "fov out of range");
  if (frame.image_width < 1 || frame.image_height < 1) throw Error(Errc::InvalidFrame, "image size");
  if (!(frame.platform.lat >= -90 && frame.platform.lat <= 90 && frame.platform.lon >= -180 &&
        frame.platform.lon <= 180))
    throw Error(Errc::InvalidFrame, "platform position out of range");
  if (!std::isfinite(frame.yaw) || !std::isfinite(frame.pitch) || !std::isfinite(frame.roll) ||
      !std::isfinite(frame.timestamp))
    throw Error(Errc::InvalidFrame, "non-finite attitude or timestamp");
}

void validate(const BBox& b, const FrameMeta& frame) {
  if (!(b.x_min >= 0 && b.x_min < b.x_max && b.x_max <= frame.image_width && b.y_min >= 0 &&
        b.y_min < b.y_max && b.y_max <= frame.image_height))
    throw Error(Errc::InvalidBBox, "bbox outside image or empty");
}

std::array<double, 3> pixel_ray_enu(const FrameMeta& frame, double u, double v) {
  const double ax = std::atan((2.0 * u / frame.image_width - 1.0) * std::tan(deg2rad(frame.hfov) / 2));
  const double ay = std::atan((2.0 * v / frame.image_height - 1.0) * std::tan(deg2rad(frame.vfov) / 2));

  // Camera axes at zero attitude: right = east, forward = north, up = up.
  // Image v grows downward.
  double e = std::tan(ax);
  double n = 1.0;
  double up = -std::tan(ay);
  const double norm = std::sqrt(e * e + n * n + up * up);
  e /= norm;
  n /= norm;
  up /= norm;

  const double roll = deg2rad(frame.roll);
  const double pitch = deg2rad(frame.pitch);
  const double yaw = deg2rad(frame.yaw);

  // roll about the forward (north) axis
  double e1 = e * std::cos(roll) + up * std::sin(roll);
  double n1 = n;
  double u1 = -e * std::sin(roll) + up * std::cos(roll);
  // pitch about the right (east) axis
  double e2 = e1;
  double n2 = n1 * std::cos(pitch) - u1 * std::sin(pitch);
  double u2 = n1 * std::sin(pitch) + u1 * std::cos(pitch);
  // yaw clockwise about up
  double e3 = e2 * std::cos(yaw) + n2 * std::sin(yaw);
  double n3 = -e2 * std::sin(yaw) + n2 * std::cos(yaw);
  return {e3, n3, u2};
}

geo::GeoPoint geolocate_pixel(const FrameMeta& frame, double u, double v) {
  const auto ray = pixel_ray_enu(frame, u, v);
  if (!(ray[2] < 0.0)) throw Error(Errc::NoGroundIntersection, "ray at or above the horizon");
  const double s = frame.altitude_agl / -ray[2];
  const double east = s * ray[0];
  const double north = s * ray[1];
  return {frame.platform.lat + north / geo::meters_per_deg_lat(),
          geo::normalize_lon(frame.platform.lon + east / geo::meters_per_deg_lon(frame.platform.lat))};
}

geo::GeoPoint geolocate_detection(const FrameMeta& frame, const BBox& bbox) {
  validate(bbox, frame);
  return geolocate_pixel(frame, (bbox.x_min + bbox.x_max) / 2.0, (bbox.y_min + bbox.y_max) / 2.0);
}

std::optional<std::array<geo::GeoPoint, 4>> frame_footprint(const FrameMeta& frame) {
  const double w = frame.image_width;
  const double h = frame.image_height;
  try {
    return std::array<geo::GeoPoint, 4>{geolocate_pixel(frame, 0, 0), geolocate_pixel(frame, w, 0),
                                        geolocate_pixel(frame, w, h), geolocate_pixel(frame, 0, h)};
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool footprint_contains(const std::array<geo::GeoPoint, 4>& quad, const geo::GeoPoint& p) {
  // Local planar test around p; footprints are kilometres across at most.
  const double kx = geo::meters_per_deg_lon(p.lat);
  const double ky = geo::meters_per_deg_lat();
  int sign = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = quad[i];
    const auto& b = quad[(i + 1) % 4];
    const double ax = (a.lon - p.lon) * kx, ay = (a.lat - p.lat) * ky;
    const double bx = (b.lon - p.lon) * kx, by = (b.lat - p.lat) * ky;
    const double cross = ax * by - ay * bx;
    const int s = cross > 0 ? 1 : (cross < 0 ? -1 : 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

bool boxes_overlap(const BBox& a, const BBox& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  return w > 0 && h > 0;
}

std::vector<Event> detect_activities(std::span<const DetectionRecord> detections,
                                     double min_confidence, const geo::GeoPoint& fallback) {
  std::vector<const DetectionRecord*> people;
  for (const auto& d : detections)
    if (d.class_label == "person" && d.confidence >= min_confidence) people.push_back(&d);
  std::sort(people.begin(), people.end(),
            [](auto* a, auto* b) { return a->detection_id < b->detection_id; });

  std::vector<std::size_t> parent(people.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < people.size(); ++i)
    for (std::size_t j = i + 1; j < people.size(); ++j)
      if (boxes_overlap(people[i]->bbox, people[j]->bbox)) {
        const auto ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }

  std::map<std::size_t, std::vector<const DetectionRecord*>> components;
  for (std::size_t i = 0; i < people.size(); ++i) components[find(i)].push_back(people[i]);

  std::vector<Event> events;
  for (const auto& [root, members] : components) {
    if (members.size() < 2) continue;
    double lat = 0, lon = 0;
    std::size_t located = 0;
    std::vector<std::string> subjects;
    for (const auto* m : members) {
      subjects.push_back(m->detection_id);
      if (m->geolocation) {
        lat += m->geolocation->lat;
        lon += m->geolocation->lon;
        ++located;
      }
    }
    const geo::GeoPoint where = located ? geo::GeoPoint{lat / located, lon / located} : fallback;
    const auto kind = members.size() == 2 ? EventKind::Meeting : EventKind::Gathering;
    events.push_back(make_event(kind, EventSource::FMV, members.front()->timestamp, where, subjects,
                                {{"frame_id", members.front()->frame_id},
                                 {"count", members.size()},
                                 {"located_members", located}}));
  }
  return events;
}

FrameResult FmvProcessor::ingest_detection_frame(const FrameMeta& frame,
                                                 std::span<const DetectionInput> detections) {
  validate(frame);
  FrameResult result;
  result.records.reserve(detections.size());
  for (const auto& in : detections) {
    DetectionRecord r;
    r.detection_id = in.detection_id;
    r.frame_id = frame.frame_id;
    r.source = frame.source;
    r.timestamp = frame.timestamp;
    r.class_label = in.class_label;
    r.confidence = in.confidence;
    r.bbox = in.bbox;
    r.feature_id = in.feature_id;
    try {
      if (!(in.confidence >= 0 && in.confidence <= 1))
        throw Error(Errc::InvalidArgument, "confidence outside [0,1]");
      r.geolocation = geolocate_detection(frame, in.bbox);
    } catch (const Error& e) {
      r.geolocation_error = e.what();
      ++geolocation_failures_;
    }
    result.records.push_back(std::move(r));
  }
  result.events = detect_activities(result.records, confidence_threshold_, frame.platform);

  for (const auto& r : result.records) records_.push_back(r);
  while (records_.size() > max_records_) records_.pop_front();
  ++frames_;
  return result;
}

std::vector<DetectionRecord> FmvProcessor::detections(double since_t, const std::string& class_label) const {
  std::vector<DetectionRecord> out;
  for (const auto& r : records_)
    if (r.timestamp >= since_t && (class_label.empty() || r.class_label == class_label)) out.push_back(r);
  return out;
}

std::optional<DetectionRecord> FmvProcessor::find(const std::string& detection_id) const {
  for (auto it = records_.rbegin(); it != records_.rend(); ++it)
    if (it->detection_id == detection_id) return *it;
  return std::nullopt;
}

}  // namespace cop::fmv
