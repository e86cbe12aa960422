#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cop/event.hpp"
#include "cop/geo.hpp"
#include "cop/track_store.hpp"

namespace cop {

/// Free parameters of the AIS event rules.
struct EventConfig {
  double t_gone = 900.0;        // s of silence before Disappearance
  double theta_off = 1000.0;    // m of deviation from prediction
  double horizon_off = 600.0;   // s, max age of the prior used for prediction
  double d_coloc = 100.0;       // m
  int debounce_coloc = 2;       // consecutive epochs
  double epoch = 60.0;          // s
  double horizon_proj = 1800.0; // s
  double proj_step = 60.0;      // s

  void validate() const;
};

/// Evaluates appearance, disappearance, off-course, co-location and geofence
/// rules. Presence flips are written back to the store; everything else is
/// bookkeeping held here. One evaluator per store.
class AisEventEngine {
 public:
  AisEventEngine(TrackStore& store, EventConfig config);

  /// Call only when `delta.is_new_latest`.
  std::vector<Event> on_new_latest(const ais::AisPositionReport& report, const TrackDelta& delta);

  /// Disappearance and co-location at an epoch boundary.
  std::vector<Event> on_epoch(double t, const TrackSnapshot& snapshot);

  std::vector<Event> evaluate_geofences(double t, const TrackSnapshot& snapshot,
                                        const std::vector<geo::GeofenceBox>& fences);

  /// Drops all bookkeeping for a fence; later evaluations start fresh.
  void forget_fence(const std::string& fence_id);
  void forget_track(Mmsi mmsi);

  const EventConfig& config() const { return config_; }
  std::size_t unknown_fence_skips() const { return unknown_fence_skips_; }

 private:
  struct PairState {
    int consecutive = 0;
    bool fired = false;
  };
  struct FenceState {
    bool inside = false;
    bool projected = false;
  };

  std::optional<Event> check_off_course(const ais::AisPositionReport& report, const Track& track);
  bool projected_entry(const SnapshotEntry& entry, const geo::GeofenceBox& fence) const;

  TrackStore& store_;
  EventConfig config_;
  std::map<Mmsi, double> last_off_course_;
  std::map<std::pair<Mmsi, Mmsi>, PairState> pairs_;
  std::map<std::pair<Mmsi, std::string>, FenceState> fence_states_;
  std::size_t unknown_fence_skips_ = 0;
};

}  // namespace cop
