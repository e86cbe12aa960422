#include "cop/json_io.hpp"

#include <cstdio>

#include "cop/error.hpp"

namespace cop {

namespace {

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string hex2(std::uint8_t v) {
  char buf[3];
  std::snprintf(buf, sizeof buf, "%02X", v);
  return buf;
}

}  // namespace

namespace geo {

void to_json(nlohmann::json& j, const GeoPoint& p) { j = {{"lat", p.lat}, {"lon", p.lon}}; }

void from_json(const nlohmann::json& j, GeoPoint& p) {
  p.lat = j.at("lat").get<double>();
  p.lon = j.at("lon").get<double>();
}

void to_json(nlohmann::json& j, const GeofenceBox& b) {
  j = {{"id", b.id}, {"min_lat", b.min_lat}, {"max_lat", b.max_lat}, {"min_lon", b.min_lon}, {"max_lon", b.max_lon}};
}

void from_json(const nlohmann::json& j, GeofenceBox& b) {
  b.id = j.at("id").get<std::string>();
  b.min_lat = j.at("min_lat").get<double>();
  b.max_lat = j.at("max_lat").get<double>();
  b.min_lon = j.at("min_lon").get<double>();
  b.max_lon = j.at("max_lon").get<double>();
}

}  // namespace geo

namespace ais {

void to_json(nlohmann::json& j, const AisPositionReport& r) {
  j = {{"mmsi", r.mmsi},   {"message_type", r.message_type}, {"timestamp", r.timestamp},
       {"lat", opt(r.lat)}, {"lon", opt(r.lon)},             {"sog", opt(r.sog)},
       {"cog", opt(r.cog)}, {"heading", opt(r.heading)}};
}

void to_json(nlohmann::json& j, const AisStaticReport& r) {
  j = {{"mmsi", r.mmsi}, {"vessel_name", r.vessel_name}, {"ship_type", r.ship_type}, {"callsign", r.callsign}};
}

void to_json(nlohmann::json& j, const RawSentence& s) {
  j = {{"talker", s.talker},
       {"fragment_count", s.fragment_count},
       {"fragment_number", s.fragment_number},
       {"sequence_id", opt(s.sequence_id)},
       {"channel", std::string(1, s.channel)},
       {"armored_payload", s.armored_payload},
       {"fill_bits", s.fill_bits},
       {"checksum", hex2(s.checksum)},
       {"complete", s.complete()}};
}

}  // namespace ais

void to_json(nlohmann::json& j, const Event& e) {
  j = {{"id", e.id},
       {"kind", to_string(e.kind)},
       {"timestamp", e.timestamp},
       {"location", opt(e.location)},
       {"subjects", e.subjects},
       {"details", e.details},
       {"source", to_string(e.source)}};
}

void from_json(const nlohmann::json& j, Event& e) {
  e.id = j.at("id").get<std::uint64_t>();
  const auto kind = parse_event_kind(j.at("kind").get<std::string>());
  const auto source = parse_event_source(j.at("source").get<std::string>());
  if (!kind || !source) throw Error(Errc::CorruptInputRecord, "unknown event kind or source");
  e.kind = *kind;
  e.source = *source;
  e.timestamp = j.at("timestamp").get<double>();
  if (j.contains("location") && !j.at("location").is_null()) e.location = j.at("location").get<geo::GeoPoint>();
  else e.location.reset();
  e.subjects = j.at("subjects").get<std::vector<std::string>>();
  e.details = j.value("details", nlohmann::json::object());
}

void to_json(nlohmann::json& j, const SnapshotEntry& e) {
  j = {{"mmsi", e.mmsi},
       {"last_report", e.last_report},
       {"predicted", e.predicted},
       {"staleness", e.staleness},
       {"held", e.held},
       {"verification_state", to_string(e.verification_state)},
       {"presence", to_string(e.presence)},
       {"static_info", opt(e.static_info)}};
}

void to_json(nlohmann::json& j, const Track& t) {
  j = {{"mmsi", t.mmsi},
       {"reports", t.reports},
       {"static_info", opt(t.static_info)},
       {"last_seen", t.last_seen},
       {"verification_state", to_string(t.verification_state)},
       {"presence", to_string(t.presence)}};
}

void to_json(nlohmann::json& j, const Prediction& p) {
  j = {{"position", p.position}, {"staleness", p.staleness}, {"held", p.held}, {"report_time", p.report_time}};
}

namespace fmv {

void to_json(nlohmann::json& j, const FrameMeta& f) {
  j = {{"frame_id", f.frame_id}, {"timestamp", f.timestamp},     {"platform", f.platform},
       {"altitude_agl", f.altitude_agl}, {"yaw", f.yaw},         {"pitch", f.pitch},
       {"roll", f.roll},         {"hfov", f.hfov},               {"vfov", f.vfov},
       {"image_width", f.image_width}, {"image_height", f.image_height}, {"source", f.source}};
}

void from_json(const nlohmann::json& j, FrameMeta& f) {
  f.frame_id = j.at("frame_id").get<std::string>();
  f.timestamp = j.at("timestamp").get<double>();
  f.platform = j.at("platform").get<geo::GeoPoint>();
  f.altitude_agl = j.at("altitude_agl").get<double>();
  f.yaw = j.at("yaw").get<double>();
  f.pitch = j.at("pitch").get<double>();
  f.roll = j.at("roll").get<double>();
  f.hfov = j.at("hfov").get<double>();
  f.vfov = j.at("vfov").get<double>();
  f.image_width = j.at("image_width").get<int>();
  f.image_height = j.at("image_height").get<int>();
  f.source = j.value("source", std::string("uav"));
}

void to_json(nlohmann::json& j, const BBox& b) {
  j = {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}};
}

void from_json(const nlohmann::json& j, BBox& b) {
  b.x_min = j.at("x_min").get<double>();
  b.y_min = j.at("y_min").get<double>();
  b.x_max = j.at("x_max").get<double>();
  b.y_max = j.at("y_max").get<double>();
}

void to_json(nlohmann::json& j, const DetectionRecord& d) {
  j = {{"detection_id", d.detection_id},
       {"frame_id", d.frame_id},
       {"source", d.source},
       {"timestamp", d.timestamp},
       {"class_label", d.class_label},
       {"confidence", d.confidence},
       {"bbox", d.bbox},
       {"geolocation", opt(d.geolocation)},
       {"geolocation_error", opt(d.geolocation_error)},
       {"feature_id", opt(d.feature_id)}};
}

void from_json(const nlohmann::json& j, DetectionInput& d) {
  d.detection_id = j.at("detection_id").get<std::string>();
  d.class_label = j.at("class_label").get<std::string>();
  d.confidence = j.at("confidence").get<double>();
  d.bbox = j.at("bbox").get<BBox>();
  if (j.contains("feature_id") && !j.at("feature_id").is_null()) d.feature_id = j.at("feature_id").get<std::string>();
}

}  // namespace fmv

namespace fusion {

void to_json(nlohmann::json& j, const CueTask& c) {
  j = {{"cue_id", c.cue_id},         {"target", c.target},     {"reason", c.reason},
       {"created_at", c.created_at}, {"deadline", c.deadline}, {"state", to_string(c.state)},
       {"subject_mmsi", c.subject_mmsi}};
}

void to_json(nlohmann::json& j, const CorrelationRecord& c) {
  j = {{"detection_id", c.detection_id}, {"mmsi", c.mmsi}, {"distance", c.distance}, {"timestamp", c.timestamp}};
}

}  // namespace fusion

namespace similarity {

void to_json(nlohmann::json& j, const SearchHit& h) { j = {{"feature_id", h.feature_id}, {"similarity", h.similarity}}; }

void to_json(nlohmann::json& j, const FeatureMetadata& m) {
  j = {{"detection_id", m.detection_id}, {"class_label", m.class_label}, {"timestamp", m.timestamp}};
}

void from_json(const nlohmann::json& j, FeatureMetadata& m) {
  m.detection_id = j.value("detection_id", std::string{});
  m.class_label = j.value("class_label", std::string{});
  m.timestamp = j.value("timestamp", 0.0);
}

void to_json(nlohmann::json& j, const ProjectedPoint& p) {
  j = {{"feature_id", p.feature_id}, {"class_label", p.class_label}, {"x", p.x}, {"y", p.y}};
}

}  // namespace similarity

namespace analytics {

void to_json(nlohmann::json& j, const CountSeries& s) {
  nlohmann::json buckets = nlohmann::json::array();
  for (std::size_t i = 0; i < s.buckets.size(); ++i)
    buckets.push_back({{"bucket_start", s.buckets[i].first}, {"count", s.buckets[i].second}, {"closed", i < s.closed}});
  j = {{"class_label", s.class_label}, {"bucket_seconds", s.bucket_seconds}, {"buckets", buckets}};
}

}  // namespace analytics

}  // namespace cop
