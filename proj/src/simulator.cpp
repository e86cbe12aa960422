#include "cop/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "cop/error.hpp"
#include "cop/json_io.hpp"

namespace cop::sim {

namespace {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::uint8_t xor_checksum(std::string_view s) {
  std::uint8_t c = 0;
  for (char ch : s) c ^= static_cast<std::uint8_t>(ch);
  return c;
}

std::string hex2(std::uint8_t v) {
  char buf[3];
  std::snprintf(buf, sizeof buf, "%02X", v);
  return buf;
}

unsigned sixbit_of(char c) {
  if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  const auto u = static_cast<unsigned char>(c);
  if (u >= 64 && u <= 95) return u - 64;
  if (u >= 32 && u <= 63) return u;
  return 63;  // '?'
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidScenario, what); }

}  // namespace

// ---------------------------------------------------------------------------
// Encoding

void BitWriter::put_uint(std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) bits_.push_back(((value >> i) & 1u) != 0);
}

void BitWriter::put_int(std::int64_t value, int width) {
  put_uint(static_cast<std::uint64_t>(value) & ((std::uint64_t{1} << width) - 1), width);
}

void BitWriter::put_text(const std::string& text, int chars) {
  for (int i = 0; i < chars; ++i)
    put_uint(i < static_cast<int>(text.size()) ? sixbit_of(text[static_cast<std::size_t>(i)]) : 0, 6);
}

std::string armor(const std::vector<bool>& bits, int* fill_bits) {
  const std::size_t fill = (6 - bits.size() % 6) % 6;
  std::string out;
  for (std::size_t i = 0; i < bits.size() + fill; i += 6) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 6; ++k) v = (v << 1) | (i + k < bits.size() && bits[i + k] ? 1u : 0u);
    unsigned c = v + 48;
    if (c > 87) c += 8;
    out.push_back(static_cast<char>(c));
  }
  if (fill_bits) *fill_bits = static_cast<int>(fill);
  return out;
}

std::vector<bool> encode_position(const PositionFields& f) {
  BitWriter w;
  w.put_uint(static_cast<std::uint64_t>(f.message_type), 6);
  w.put_uint(0, 2);  // repeat indicator
  w.put_uint(f.mmsi, 30);
  w.put_uint(static_cast<std::uint64_t>(f.nav_status), 4);
  w.put_int(-128, 8);  // rate of turn not available
  w.put_uint(static_cast<std::uint64_t>(f.sog_tenths), 10);
  w.put_uint(f.position_accuracy ? 1 : 0, 1);
  w.put_int(f.lon_raw, 28);
  w.put_int(f.lat_raw, 27);
  w.put_uint(static_cast<std::uint64_t>(f.cog_tenths), 12);
  w.put_uint(static_cast<std::uint64_t>(f.heading), 9);
  w.put_uint(static_cast<std::uint64_t>(f.utc_second), 6);
  w.put_uint(0, 2);   // maneuver
  w.put_uint(0, 3);   // spare
  w.put_uint(0, 1);   // RAIM
  w.put_uint(0, 19);  // radio status
  return w.bits();
}

std::vector<bool> encode_static(const StaticFields& f) {
  BitWriter w;
  w.put_uint(5, 6);
  w.put_uint(0, 2);
  w.put_uint(f.mmsi, 30);
  w.put_uint(0, 2);   // AIS version
  w.put_uint(0, 30);  // IMO
  w.put_text(f.callsign, 7);
  w.put_text(f.name, 20);
  w.put_uint(static_cast<std::uint64_t>(f.ship_type), 8);
  w.put_uint(static_cast<std::uint64_t>(f.to_bow), 9);
  w.put_uint(static_cast<std::uint64_t>(f.to_stern), 9);
  w.put_uint(static_cast<std::uint64_t>(f.to_port), 6);
  w.put_uint(static_cast<std::uint64_t>(f.to_starboard), 6);
  w.put_uint(1, 4);  // EPFD: GPS
  w.put_uint(0, 20); // ETA not available
  w.put_uint(0, 8);  // draught
  w.put_text(f.destination, 20);
  w.put_uint(0, 1);  // DTE
  w.put_uint(0, 1);
  return w.bits();
}

std::vector<std::string> to_sentences(const std::vector<bool>& bits, int sequence_id, char channel,
                                      std::optional<double> receipt_time, std::size_t max_payload) {
  int fill = 0;
  const std::string payload = armor(bits, &fill);
  const std::size_t count = std::max<std::size_t>(1, (payload.size() + max_payload - 1) / max_payload);
  std::string tag;
  if (receipt_time) {
    const std::string body = "c:" + format_number(*receipt_time);
    tag = "\\" + body + "*" + hex2(xor_checksum(body)) + "\\";
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    const bool last = i + 1 == count;
    std::string body = "AIVDM," + std::to_string(count) + "," + std::to_string(i + 1) + "," +
                       (count > 1 ? std::to_string(sequence_id) : std::string{}) + "," + channel + "," +
                       payload.substr(i * max_payload, max_payload) + "," + std::to_string(last ? fill : 0);
    out.push_back(tag + "!" + body + "*" + hex2(xor_checksum(body)));
  }
  return out;
}

PositionFields quantize(Mmsi mmsi, double t, const geo::GeoPoint& p, double sog_kn, double cog_deg) {
  PositionFields f;
  f.mmsi = mmsi;
  f.lat_raw = static_cast<std::int32_t>(std::llround(p.lat * 600000.0));
  f.lon_raw = static_cast<std::int32_t>(std::llround(p.lon * 600000.0));
  f.sog_tenths = static_cast<int>(std::min<long long>(1022, std::llround(sog_kn * 10.0)));
  f.cog_tenths = static_cast<int>(std::llround(cog_deg * 10.0) % 3600);
  f.heading = static_cast<int>(std::llround(cog_deg) % 360);
  f.utc_second = static_cast<int>(static_cast<long long>(std::floor(t)) % 60);
  return f;
}

// ---------------------------------------------------------------------------
// Scenario files

void Scenario::validate() const {
  if (!(duration > 0) || !std::isfinite(duration)) invalid("duration must be > 0");
  if (!std::isfinite(start_time)) invalid("start_time must be finite");
  if (!(detection_noise_sigma >= 0)) invalid("detection_noise_sigma must be >= 0");
  std::set<Mmsi> seen;
  for (const auto& v : vessels) {
    if (v.mmsi == 0 || v.mmsi >= (1u << 30)) invalid("mmsi out of range");
    if (!seen.insert(v.mmsi).second) invalid("duplicate mmsi " + std::to_string(v.mmsi));
    if (!(v.report_interval > 0)) invalid("report_interval must be > 0");
    if (!(v.report_offset >= 0)) invalid("report_offset must be >= 0");
    if (std::abs(v.start.lat) > 90 || std::abs(v.start.lon) > 180) invalid("start out of range");
    for (const auto& leg : v.legs) {
      if (!(leg.speed_kn > 0) || leg.speed_kn > 102.2) invalid("leg speeds must be in (0, 102.2] kn");
      if (std::abs(leg.to.lat) > 90 || std::abs(leg.to.lon) > 180) invalid("waypoint out of range");
    }
    for (const auto& s : v.ais_silences)
      if (!(s.from < s.to)) invalid("silence intervals need from < to");
    if (!(v.length_m > 0)) invalid("length_m must be > 0");
  }
  if (uav) {
    if (!(uav->radius_m >= 0) || !(uav->period_s > 0) || !(uav->altitude_m > 0) || !(uav->frame_interval > 0) ||
        !(uav->frame_offset >= 0))
      invalid("uav needs radius >= 0, period > 0, altitude > 0, frame_interval > 0");
    const auto& c = uav->camera;
    if (!(c.hfov > 0 && c.hfov < 180 && c.vfov > 0 && c.vfov < 180) || c.image_width < 1 || c.image_height < 1)
      invalid("camera fov or image size out of range");
  }
  std::set<std::string> ids;
  for (const auto& f : geofences) {
    try {
      geo::validate(f);
    } catch (const Error& e) {
      invalid(e.message());
    }
    if (!ids.insert(f.id).second) invalid("duplicate geofence id " + f.id);
  }
}

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) invalid("unknown key " + where + "." + key);
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  try {
    check_keys(j, {"name", "seed", "start_time", "duration", "vessels", "uav", "detection_noise_sigma", "geofences"},
               "scenario");
    Scenario s;
    s.name = j.value("name", std::string{});
    s.seed = j.value("seed", std::uint64_t{1});
    s.start_time = j.value("start_time", 0.0);
    s.duration = j.at("duration").get<double>();
    s.detection_noise_sigma = j.value("detection_noise_sigma", 0.0);
    for (const auto& v : j.value("vessels", json::array())) {
      check_keys(v,
                 {"mmsi", "name", "callsign", "ship_type", "class_label", "start", "legs", "report_interval",
                  "report_offset", "dark", "ais_silences", "static_interval", "length_m"},
                 "vessel");
      VesselSpec spec;
      spec.mmsi = v.at("mmsi").get<Mmsi>();
      spec.name = v.value("name", std::string{});
      spec.callsign = v.value("callsign", std::string{});
      spec.ship_type = v.value("ship_type", 70);
      spec.class_label = v.value("class_label", std::string("boat"));
      spec.start = v.at("start").get<geo::GeoPoint>();
      for (const auto& leg : v.value("legs", json::array()))
        spec.legs.push_back({leg.at("to").get<geo::GeoPoint>(), leg.at("speed_kn").get<double>()});
      spec.report_interval = v.value("report_interval", 10.0);
      spec.report_offset = v.value("report_offset", 0.0);
      spec.dark = v.value("dark", false);
      for (const auto& iv : v.value("ais_silences", json::array()))
        spec.ais_silences.push_back({iv.at("from").get<double>(), iv.at("to").get<double>()});
      spec.static_interval = v.value("static_interval", -1.0);
      spec.length_m = v.value("length_m", 30.0);
      s.vessels.push_back(std::move(spec));
    }
    if (j.contains("uav") && !j.at("uav").is_null()) {
      const auto& u = j.at("uav");
      check_keys(u, {"orbit_center", "radius_m", "period_s", "altitude_m", "camera", "frame_interval", "frame_offset"},
                 "uav");
      UavSpec uav;
      uav.orbit_center = u.at("orbit_center").get<geo::GeoPoint>();
      uav.radius_m = u.value("radius_m", 0.0);
      uav.period_s = u.value("period_s", 600.0);
      uav.altitude_m = u.at("altitude_m").get<double>();
      uav.frame_interval = u.value("frame_interval", 10.0);
      uav.frame_offset = u.value("frame_offset", 0.0);
      if (u.contains("camera")) {
        const auto& c = u.at("camera");
        check_keys(c, {"yaw", "pitch", "roll", "hfov", "vfov", "image_width", "image_height"}, "camera");
        uav.camera.yaw = c.value("yaw", 0.0);
        uav.camera.pitch = c.value("pitch", -90.0);
        uav.camera.roll = c.value("roll", 0.0);
        uav.camera.hfov = c.value("hfov", 60.0);
        uav.camera.vfov = c.value("vfov", 45.0);
        uav.camera.image_width = c.value("image_width", 1920);
        uav.camera.image_height = c.value("image_height", 1080);
      }
      s.uav = uav;
    }
    for (const auto& f : j.value("geofences", json::array())) s.geofences.push_back(f.get<geo::GeofenceBox>());
    s.validate();
    return s;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    invalid(e.what());
  }
}

json scenario_to_json(const Scenario& s) {
  json vessels = json::array();
  for (const auto& v : s.vessels) {
    json legs = json::array();
    for (const auto& leg : v.legs) legs.push_back({{"to", leg.to}, {"speed_kn", leg.speed_kn}});
    json silences = json::array();
    for (const auto& iv : v.ais_silences) silences.push_back({{"from", iv.from}, {"to", iv.to}});
    vessels.push_back({{"mmsi", v.mmsi},
                       {"name", v.name},
                       {"callsign", v.callsign},
                       {"ship_type", v.ship_type},
                       {"class_label", v.class_label},
                       {"start", v.start},
                       {"legs", legs},
                       {"report_interval", v.report_interval},
                       {"report_offset", v.report_offset},
                       {"dark", v.dark},
                       {"ais_silences", silences},
                       {"static_interval", v.static_interval},
                       {"length_m", v.length_m}});
  }
  json j{{"name", s.name},
         {"seed", s.seed},
         {"start_time", s.start_time},
         {"duration", s.duration},
         {"vessels", vessels},
         {"detection_noise_sigma", s.detection_noise_sigma},
         {"geofences", s.geofences}};
  if (s.uav) {
    const auto& u = *s.uav;
    j["uav"] = {{"orbit_center", u.orbit_center},
                {"radius_m", u.radius_m},
                {"period_s", u.period_s},
                {"altitude_m", u.altitude_m},
                {"frame_interval", u.frame_interval},
                {"frame_offset", u.frame_offset},
                {"camera",
                 {{"yaw", u.camera.yaw},
                  {"pitch", u.camera.pitch},
                  {"roll", u.camera.roll},
                  {"hfov", u.camera.hfov},
                  {"vfov", u.camera.vfov},
                  {"image_width", u.camera.image_width},
                  {"image_height", u.camera.image_height}}}};
  }
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    invalid(e.what());
  }
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Motion and camera

Trajectory::Trajectory(const VesselSpec& spec) : start_(spec.start) {
  geo::GeoPoint from = spec.start;
  double t = 0.0;
  for (const auto& leg : spec.legs) {
    Segment s;
    s.from = from;
    s.to = leg.to;
    s.length = geo::haversine_distance(from, leg.to);
    if (!(s.length > 0)) invalid("zero-length leg for mmsi " + std::to_string(spec.mmsi));
    s.bearing = geo::initial_bearing(from, leg.to);
    s.speed_kn = leg.speed_kn;
    s.speed_mps = leg.speed_kn * geo::kKnotToMps;
    s.t0 = t;
    s.t1 = t + s.length / s.speed_mps;
    t = s.t1;
    from = leg.to;
    segments_.push_back(s);
  }
  if (!segments_.empty()) {
    const auto& last = segments_.back();
    final_cog_ = std::fmod(geo::initial_bearing(last.to, last.from) + 180.0, 360.0);
  }
}

VesselState Trajectory::at(double t) const {
  if (segments_.empty()) return {start_, 0.0, 0.0};
  t = std::max(t, 0.0);
  for (const auto& s : segments_) {
    if (t >= s.t1) continue;
    const double d = s.speed_mps * (t - s.t0);
    VesselState st;
    st.position = geo::destination(s.from, s.bearing, d);
    st.sog_kn = s.speed_kn;
    st.cog_deg = s.length - d > 1.0 ? geo::initial_bearing(st.position, s.to)
                                    : std::fmod(geo::initial_bearing(s.to, s.from) + 180.0, 360.0);
    return st;
  }
  return {segments_.back().to, 0.0, final_cog_};
}

namespace {

geo::GeoPoint uav_position(const UavSpec& uav, double tau) {
  const double theta = 2.0 * geo::kPi * tau / uav.period_s;
  const double east = uav.radius_m * std::sin(theta);
  const double north = uav.radius_m * std::cos(theta);
  return {uav.orbit_center.lat + north / geo::meters_per_deg_lat(),
          uav.orbit_center.lon + east / geo::meters_per_deg_lon(uav.orbit_center.lat)};
}

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Mat3 transpose(const Mat3& a) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

// Camera-to-world rotation on (east, north, up) for the attitude convention
// of the frame metadata: roll about forward, then pitch about right, then
// yaw clockwise about up.
Mat3 camera_to_world(const CameraSpec& c) {
  const double r = geo::deg2rad(c.roll), p = geo::deg2rad(c.pitch), y = geo::deg2rad(c.yaw);
  const Mat3 roll{{{std::cos(r), 0, std::sin(r)}, {0, 1, 0}, {-std::sin(r), 0, std::cos(r)}}};
  const Mat3 pitch{{{1, 0, 0}, {0, std::cos(p), -std::sin(p)}, {0, std::sin(p), std::cos(p)}}};
  const Mat3 yaw{{{std::cos(y), std::sin(y), 0}, {-std::sin(y), std::cos(y), 0}, {0, 0, 1}}};
  return mul(yaw, mul(pitch, roll));
}

}  // namespace

json uav_frame(const UavSpec& uav, double start_time, double t, const std::string& frame_id) {
  const auto p = uav_position(uav, t - start_time);
  return {{"frame_id", frame_id},
          {"timestamp", t},
          {"platform", {{"lat", p.lat}, {"lon", p.lon}}},
          {"altitude_agl", uav.altitude_m},
          {"yaw", uav.camera.yaw},
          {"pitch", uav.camera.pitch},
          {"roll", uav.camera.roll},
          {"hfov", uav.camera.hfov},
          {"vfov", uav.camera.vfov},
          {"image_width", uav.camera.image_width},
          {"image_height", uav.camera.image_height},
          {"source", "uav"}};
}

std::optional<std::array<double, 2>> project_to_pixel(const UavSpec& uav, const geo::GeoPoint& platform,
                                                      const geo::GeoPoint& target) {
  const double east = (target.lon - platform.lon) * geo::meters_per_deg_lon(platform.lat);
  const double north = (target.lat - platform.lat) * geo::meters_per_deg_lat();
  const double up = -uav.altitude_m;
  const Mat3 inv = transpose(camera_to_world(uav.camera));
  const double w[3] = {east, north, up};
  double c[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) c[i] += inv[i][k] * w[k];
  if (!(c[1] > 1e-9)) return std::nullopt;
  const double xn = (c[0] / c[1]) / std::tan(geo::deg2rad(uav.camera.hfov) / 2);
  const double yn = -(c[2] / c[1]) / std::tan(geo::deg2rad(uav.camera.vfov) / 2);
  return std::array<double, 2>{(xn + 1.0) * uav.camera.image_width / 2.0,
                               (yn + 1.0) * uav.camera.image_height / 2.0};
}

}  // namespace cop::sim
