#include "cop/config.hpp"

#include <fstream>
#include <set>

#include "cop/error.hpp"
#include "cop/json_io.hpp"

namespace cop {

namespace {

using nlohmann::json;

void check_keys(const json& section, const std::string& name, const std::set<std::string>& allowed) {
  if (!section.is_object()) throw Error(Errc::InvalidConfig, "section '" + name + "' must be an object");
  for (const auto& [key, _] : section.items())
    if (!allowed.count(key)) throw Error(Errc::InvalidConfig, "unknown key '" + name + "." + key + "'");
}

template <typename T>
void read(const json& section, const char* key, T& out) {
  if (section.contains(key)) out = section.at(key).get<T>();
}

}  // namespace

void CopConfig::validate() const {
  events.validate();
  fusion.validate();
  projection.validate();
  anomaly.validate();
  if (!(confidence_threshold >= 0 && confidence_threshold <= 1))
    throw Error(Errc::InvalidConfig, "confidence_threshold must lie in [0,1]");
  if (bucket_seconds < 1) throw Error(Errc::InvalidConfig, "bucket_seconds must be >= 1");
  if (!(fragment_max_age > 0)) throw Error(Errc::InvalidConfig, "fragment_max_age must be > 0");
  if (!(track_eviction > 0)) throw Error(Errc::InvalidConfig, "eviction_seconds must be > 0");
  if (port < 0 || port > 65535) throw Error(Errc::InvalidConfig, "port out of range");
  std::set<std::string> ids;
  for (const auto& g : geofences) {
    geo::validate(g);
    if (!ids.insert(g.id).second) throw Error(Errc::InvalidConfig, "duplicate geofence id " + g.id);
  }
}

CopConfig config_from_json(const json& j) {
  CopConfig c;
  try {
    check_keys(j, "<root>",
               {"events", "fusion", "projection", "anomaly", "fmv", "analytics", "decoder", "store", "similarity",
                "geofences", "service"});
    if (j.contains("events")) {
      const auto& s = j.at("events");
      check_keys(s, "events",
                 {"t_gone", "theta_off", "horizon_off", "d_coloc", "debounce_coloc", "epoch", "horizon_proj", "proj_step"});
      read(s, "t_gone", c.events.t_gone);
      read(s, "theta_off", c.events.theta_off);
      read(s, "horizon_off", c.events.horizon_off);
      read(s, "d_coloc", c.events.d_coloc);
      read(s, "debounce_coloc", c.events.debounce_coloc);
      read(s, "epoch", c.events.epoch);
      read(s, "horizon_proj", c.events.horizon_proj);
      read(s, "proj_step", c.events.proj_step);
    }
    if (j.contains("fusion")) {
      const auto& s = j.at("fusion");
      check_keys(s, "fusion", {"gate_m", "max_track_age", "dark_frames", "cue_window", "vessel_classes"});
      read(s, "gate_m", c.fusion.gate_m);
      read(s, "max_track_age", c.fusion.max_track_age);
      read(s, "dark_frames", c.fusion.dark_frames);
      read(s, "cue_window", c.fusion.cue_window);
      if (s.contains("vessel_classes"))
        c.fusion.vessel_classes = s.at("vessel_classes").get<std::set<std::string>>();
    }
    if (j.contains("projection")) {
      const auto& s = j.at("projection");
      check_keys(s, "projection", {"k_neighbors", "n_epochs", "learning_rate", "negative_samples", "seed"});
      read(s, "k_neighbors", c.projection.k_neighbors);
      read(s, "n_epochs", c.projection.n_epochs);
      read(s, "learning_rate", c.projection.learning_rate);
      read(s, "negative_samples", c.projection.negative_samples);
      read(s, "seed", c.projection.seed);
    }
    if (j.contains("anomaly")) {
      const auto& s = j.at("anomaly");
      check_keys(s, "anomaly", {"window", "min_history", "z_threshold"});
      read(s, "window", c.anomaly.window);
      read(s, "min_history", c.anomaly.min_history);
      read(s, "z_threshold", c.anomaly.z_threshold);
    }
    if (j.contains("fmv")) {
      check_keys(j.at("fmv"), "fmv", {"confidence_threshold"});
      read(j.at("fmv"), "confidence_threshold", c.confidence_threshold);
    }
    if (j.contains("analytics")) {
      check_keys(j.at("analytics"), "analytics", {"bucket_seconds"});
      read(j.at("analytics"), "bucket_seconds", c.bucket_seconds);
    }
    if (j.contains("decoder")) {
      check_keys(j.at("decoder"), "decoder", {"fragment_max_age"});
      read(j.at("decoder"), "fragment_max_age", c.fragment_max_age);
    }
    if (j.contains("store")) {
      check_keys(j.at("store"), "store", {"eviction_seconds"});
      read(j.at("store"), "eviction_seconds", c.track_eviction);
    }
    if (j.contains("similarity")) {
      check_keys(j.at("similarity"), "similarity", {"dim"});
      read(j.at("similarity"), "dim", c.feature_dim);
    }
    if (j.contains("service")) {
      check_keys(j.at("service"), "service", {"host", "port"});
      read(j.at("service"), "host", c.host);
      read(j.at("service"), "port", c.port);
    }
    if (j.contains("geofences")) c.geofences = j.at("geofences").get<std::vector<geo::GeofenceBox>>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, e.what());
  }
  return c;
}

json config_to_json(const CopConfig& c) {
  return {
      {"events",
       {{"t_gone", c.events.t_gone},
        {"theta_off", c.events.theta_off},
        {"horizon_off", c.events.horizon_off},
        {"d_coloc", c.events.d_coloc},
        {"debounce_coloc", c.events.debounce_coloc},
        {"epoch", c.events.epoch},
        {"horizon_proj", c.events.horizon_proj},
        {"proj_step", c.events.proj_step}}},
      {"fusion",
       {{"gate_m", c.fusion.gate_m},
        {"max_track_age", c.fusion.max_track_age},
        {"dark_frames", c.fusion.dark_frames},
        {"cue_window", c.fusion.cue_window},
        {"vessel_classes", c.fusion.vessel_classes}}},
      {"projection",
       {{"k_neighbors", c.projection.k_neighbors},
        {"n_epochs", c.projection.n_epochs},
        {"learning_rate", c.projection.learning_rate},
        {"negative_samples", c.projection.negative_samples},
        {"seed", c.projection.seed}}},
      {"anomaly",
       {{"window", c.anomaly.window}, {"min_history", c.anomaly.min_history}, {"z_threshold", c.anomaly.z_threshold}}},
      {"fmv", {{"confidence_threshold", c.confidence_threshold}}},
      {"analytics", {{"bucket_seconds", c.bucket_seconds}}},
      {"decoder", {{"fragment_max_age", c.fragment_max_age}}},
      {"store", {{"eviction_seconds", c.track_eviction}}},
      {"similarity", {{"dim", c.feature_dim}}},
      {"geofences", c.geofences},
      {"service", {{"host", c.host}, {"port", c.port}}},
  };
}

CopConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace cop
