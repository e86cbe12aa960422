#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cop/config.hpp"
#include "cop/geo.hpp"
#include "json.hpp"

namespace cop::sim {

using Mmsi = std::uint32_t;

// ---------------------------------------------------------------------------
// AIS encoding. The only encoder in the project; tests use it against the
// production decoder.

class BitWriter {
 public:
  void put_uint(std::uint64_t value, int width);
  void put_int(std::int64_t value, int width);
  /// Six-bit text, padded with '@' to `chars` characters.
  void put_text(const std::string& text, int chars);
  const std::vector<bool>& bits() const { return bits_; }

 private:
  std::vector<bool> bits_;
};

/// Armors bits into payload characters; returns the fill bit count.
std::string armor(const std::vector<bool>& bits, int* fill_bits);

/// Fields of a position report as transmitted, already quantized.
struct PositionFields {
  int message_type = 1;
  Mmsi mmsi = 0;
  int nav_status = 0;
  int sog_tenths = 1023;       // 1023 = not available
  bool position_accuracy = false;
  std::int32_t lon_raw = 181 * 600000;  // 1/600000 deg; 181 deg = not available
  std::int32_t lat_raw = 91 * 600000;
  int cog_tenths = 3600;       // 3600 = not available
  int heading = 511;           // 511 = not available
  int utc_second = 60;
};

struct StaticFields {
  Mmsi mmsi = 0;
  std::string callsign;
  std::string name;
  int ship_type = 0;
  int to_bow = 0, to_stern = 0, to_port = 0, to_starboard = 0;
  std::string destination;
};

std::vector<bool> encode_position(const PositionFields& f);
std::vector<bool> encode_static(const StaticFields& f);

/// Wraps a payload into checksummed AIVDM sentences, at most `max_payload`
/// characters each, with an optional tag block carrying `receipt_time`.
std::vector<std::string> to_sentences(const std::vector<bool>& bits, int sequence_id, char channel,
                                      std::optional<double> receipt_time, std::size_t max_payload = 60);

/// Rounds a kinematic state to the transmitted resolution.
PositionFields quantize(Mmsi mmsi, double t, const geo::GeoPoint& p, double sog_kn, double cog_deg);

// ---------------------------------------------------------------------------
// Scenarios

struct Leg {
  geo::GeoPoint to;
  double speed_kn = 0.0;
};

struct Interval {
  double from = 0.0;  // seconds after start_time, inclusive
  double to = 0.0;    // exclusive
};

struct VesselSpec {
  Mmsi mmsi = 0;
  std::string name;
  std::string callsign;
  int ship_type = 70;
  std::string class_label = "boat";
  geo::GeoPoint start;
  std::vector<Leg> legs;
  double report_interval = 10.0;
  double report_offset = 0.0;
  bool dark = false;
  std::vector<Interval> ais_silences;
  /// < 0: no static messages; 0: one with the first report; > 0: periodic.
  double static_interval = -1.0;
  double length_m = 30.0;
};

struct CameraSpec {
  double yaw = 0.0;
  double pitch = -90.0;
  double roll = 0.0;
  double hfov = 60.0;
  double vfov = 45.0;
  int image_width = 1920;
  int image_height = 1080;
};

struct UavSpec {
  geo::GeoPoint orbit_center;
  double radius_m = 0.0;
  double period_s = 600.0;
  double altitude_m = 1500.0;
  CameraSpec camera;
  double frame_interval = 10.0;
  double frame_offset = 0.0;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  double start_time = 0.0;
  double duration = 3600.0;
  std::vector<VesselSpec> vessels;
  std::optional<UavSpec> uav;
  /// Horizontal RMS error of simulated detections, metres.
  double detection_noise_sigma = 0.0;
  std::vector<geo::GeofenceBox> geofences;

  /// Throws Error(InvalidScenario).
  void validate() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

struct VesselState {
  geo::GeoPoint position;
  double sog_kn = 0.0;
  double cog_deg = 0.0;
};

/// Piecewise great-circle motion along the legs; the vessel stops at the
/// last waypoint. `t` is seconds after start_time.
class Trajectory {
 public:
  explicit Trajectory(const VesselSpec& spec);
  VesselState at(double t) const;
  double end_time() const { return segments_.empty() ? 0.0 : segments_.back().t1; }

 private:
  struct Segment {
    geo::GeoPoint from, to;
    double bearing = 0.0;
    double length = 0.0;
    double speed_mps = 0.0;
    double speed_kn = 0.0;
    double t0 = 0.0, t1 = 0.0;
  };
  geo::GeoPoint start_;
  std::vector<Segment> segments_;
  double final_cog_ = 0.0;
};

/// Frame metadata of the UAV at absolute time `t`.
nlohmann::json uav_frame(const UavSpec& uav, double start_time, double t, const std::string& frame_id);

/// Inverse camera model: pixel of a ground point, or nullopt when the point
/// is behind the camera. Independent of the production geolocation code.
std::optional<std::array<double, 2>> project_to_pixel(const UavSpec& uav, const geo::GeoPoint& platform,
                                                      const geo::GeoPoint& target);

struct ExpectedEvent {
  double t = 0.0;
  std::string kind;
  std::vector<std::string> subjects;
};

struct SimOutput {
  std::vector<std::string> ais_lines;
  std::vector<std::string> fmv_lines;
  nlohmann::json truth;
  std::vector<ExpectedEvent> expected_events;
  CopConfig config;  // base config with the scenario's geofences added
};

/// Generates the AIS sentences, FMV frame records and ground truth. The
/// expected events follow the service's rules evaluated on true kinematics.
SimOutput run_scenario(const Scenario& scenario, const CopConfig& base = {});

/// Writes ais.nmea, fmv.ndjson, truth.json, config.json and scenario.json.
void write_outputs(const SimOutput& out, const Scenario& scenario, const std::filesystem::path& dir);

std::vector<std::string> reference_scenario_names();
/// Throws Error(InvalidScenario) for unknown names.
Scenario reference_scenario(const std::string& name);

}  // namespace cop::sim
