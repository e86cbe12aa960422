#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cop/ais_events.hpp"
#include "cop/analytics.hpp"
#include "cop/fusion.hpp"
#include "cop/geo.hpp"
#include "cop/similarity.hpp"
#include "json.hpp"

namespace cop {

/// Everything the service reads from its config file. Section and key names
/// match the field names of the individual config types.
struct CopConfig {
  EventConfig events;
  fusion::FusionConfig fusion;
  similarity::ProjectionConfig projection;
  analytics::AnomalyConfig anomaly;

  double confidence_threshold = 0.5;   // fmv.confidence_threshold
  std::int64_t bucket_seconds = 60;    // analytics.bucket_seconds
  double fragment_max_age = 30.0;      // decoder.fragment_max_age
  double track_eviction = 86400.0;     // store.eviction_seconds
  std::size_t feature_dim = 0;         // similarity.dim, 0 = fixed by first vector
  std::vector<geo::GeofenceBox> geofences;
  std::string host = "127.0.0.1";
  int port = 8080;

  void validate() const;
};

CopConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const CopConfig& c);
/// Throws Error(InvalidConfig) on unreadable files, unknown keys or bad values.
CopConfig load_config(const std::filesystem::path& path);

}  // namespace cop
