#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cop/event.hpp"
#include "cop/geo.hpp"

namespace cop::fmv {

/// Platform and camera state for one video frame. Attitude follows the usual
/// aircraft convention: yaw clockwise from north, pitch 0 at the horizon and
/// -90 straight down, roll positive right-side down.
struct FrameMeta {
  std::string frame_id;
  double timestamp = 0.0;
  geo::GeoPoint platform;
  double altitude_agl = 0.0;
  double yaw = 0.0;
  double pitch = -90.0;
  double roll = 0.0;
  double hfov = 60.0;
  double vfov = 45.0;
  int image_width = 1920;
  int image_height = 1080;
  std::string source = "uav";
};

struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
};

struct DetectionRecord {
  std::string detection_id;
  std::string frame_id;
  std::string source = "uav";
  double timestamp = 0.0;
  std::string class_label;
  double confidence = 0.0;
  BBox bbox;
  std::optional<geo::GeoPoint> geolocation;
  std::optional<std::string> geolocation_error;
  std::optional<std::string> feature_id;
};

/// Throws Error(InvalidFrame).
void validate(const FrameMeta& frame);
/// Throws Error(InvalidBBox).
void validate(const BBox& bbox, const FrameMeta& frame);

/// Unit ray through pixel (u, v) in local east-north-up.
std::array<double, 3> pixel_ray_enu(const FrameMeta& frame, double u, double v);

/// Ground point seen at pixel (u, v); flat ground at -altitude_agl.
/// Throws Error(NoGroundIntersection) for rays at or above the horizon.
geo::GeoPoint geolocate_pixel(const FrameMeta& frame, double u, double v);

/// Ground point under the bbox center.
geo::GeoPoint geolocate_detection(const FrameMeta& frame, const BBox& bbox);

/// Ground quadrilateral of the image corners, if every corner hits the ground.
std::optional<std::array<geo::GeoPoint, 4>> frame_footprint(const FrameMeta& frame);
bool footprint_contains(const std::array<geo::GeoPoint, 4>& quad, const geo::GeoPoint& p);

bool boxes_overlap(const BBox& a, const BBox& b);

/// Meeting / Gathering from overlapping "person" boxes of one frame. Boxes
/// below `min_confidence` are ignored. `fallback` locates an event whose
/// members have no geolocation.
std::vector<Event> detect_activities(std::span<const DetectionRecord> detections,
                                     double min_confidence, const geo::GeoPoint& fallback);

struct FrameResult {
  std::vector<DetectionRecord> records;
  std::vector<Event> events;
};

/// Per-detection input as parsed from a frame record.
struct DetectionInput {
  std::string detection_id;
  std::string class_label;
  double confidence = 0.0;
  BBox bbox;
  std::optional<std::string> feature_id;
};

class FmvProcessor {
 public:
  explicit FmvProcessor(double confidence_threshold = 0.5, std::size_t max_records = 1'000'000)
      : confidence_threshold_(confidence_threshold), max_records_(max_records) {}

  /// Geolocates, stores and applies the activity heuristics. Per-detection
  /// failures are recorded on the record; the frame itself is never rejected
  /// once its metadata validates.
  FrameResult ingest_detection_frame(const FrameMeta& frame, std::span<const DetectionInput> detections);

  std::vector<DetectionRecord> detections(double since_t, const std::string& class_label = {}) const;
  std::optional<DetectionRecord> find(const std::string& detection_id) const;
  std::size_t frames_processed() const { return frames_; }
  std::size_t geolocation_failures() const { return geolocation_failures_; }
  double confidence_threshold() const { return confidence_threshold_; }

 private:
  double confidence_threshold_;
  std::size_t max_records_;
  std::deque<DetectionRecord> records_;
  std::size_t frames_ = 0;
  std::size_t geolocation_failures_ = 0;
};

}  // namespace cop::fmv
