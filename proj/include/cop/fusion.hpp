#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cop/event.hpp"
#include "cop/fmv.hpp"
#include "cop/track_store.hpp"

namespace cop::fusion {

struct FusionConfig {
  double gate_m = 200.0;
  double max_track_age = 600.0;
  int dark_frames = 3;
  double cue_window = 1200.0;
  std::set<std::string> vessel_classes{"boat", "ship", "vessel"};

  void validate() const;
  bool is_vessel_class(const std::string& label) const { return vessel_classes.count(label) > 0; }
};

struct CorrelationRecord {
  std::string detection_id;
  Mmsi mmsi = 0;
  double distance = 0.0;
  double timestamp = 0.0;

  friend bool operator==(const CorrelationRecord&, const CorrelationRecord&) = default;
};

struct CorrelationResult {
  std::vector<CorrelationRecord> matches;
  std::vector<std::string> unmatched_detections;
  std::vector<Mmsi> unmatched_tracks_in_view;
};

/// Greedy gated nearest-neighbour assignment. `detections` must already be
/// vessel-class and geolocated (others are ignored). Pairs are taken in
/// ascending (distance, mmsi, detection_id) order. Tracks in view are those
/// whose predicted position lies inside `footprint`, when given.
CorrelationResult correlate_frame(std::span<const fmv::DetectionRecord> detections,
                                  const TrackSnapshot& snapshot, const FusionConfig& config,
                                  const std::optional<std::array<geo::GeoPoint, 4>>& footprint = std::nullopt);

enum class CueState { Pending, Active, Completed, Expired };
std::string_view to_string(CueState s);

struct CueTask {
  std::uint64_t cue_id = 0;
  geo::GeoPoint target;
  std::string reason;
  double created_at = 0.0;
  double deadline = 0.0;
  CueState state = CueState::Pending;
  Mmsi subject_mmsi = 0;
};

/// Coarse category of an AIS ship type code: "vessel" for any assigned code,
/// "unknown" for 0 (not available).
std::string ship_type_category(int ship_type);

/// Verification states and cue lifecycle. Verified and the terminal cue states
/// (Completed, Expired) never change once reached.
class VerificationMachine {
 public:
  explicit VerificationMachine(double cue_window) : cue_window_(cue_window) {}

  VerificationState state(Mmsi mmsi) const;
  const std::map<Mmsi, VerificationState>& states() const { return states_; }
  const std::map<std::uint64_t, CueTask>& cues() const { return cues_; }

  /// Rule (a): a GeofenceEnter for an Unverified track creates a cue.
  std::optional<CueTask> on_geofence_enter(Mmsi mmsi, const geo::GeoPoint& target, double t,
                                           const std::string& fence_id);
  /// Analyst-initiated cue. Allowed from Unverified and Flagged.
  std::optional<CueTask> manual_cue(Mmsi mmsi, const geo::GeoPoint& target, double t, std::string reason);
  /// True when manual_cue would open a cue for `mmsi`.
  bool can_manual_cue(Mmsi mmsi) const;
  /// Rule (b). Returns VesselVerified when it completes a cue.
  std::optional<Event> on_correlation(const CorrelationRecord& match, const geo::GeoPoint& location);
  /// Rule (c): expire cues whose deadline is before `t`.
  std::vector<Event> on_tick(double t);
  /// Marks live cues Active when the sensor is looking at the target.
  void activate(std::uint64_t cue_id);

 private:
  std::optional<CueTask> open_cue(Mmsi mmsi, const geo::GeoPoint& target, double t, std::string reason);
  std::optional<std::uint64_t> live_cue_for(Mmsi mmsi) const;

  double cue_window_;
  std::uint64_t next_cue_id_ = 1;
  std::map<Mmsi, VerificationState> states_;
  std::map<std::uint64_t, CueTask> cues_;
};

/// Unmatched vessel detections that persist with no AIS track nearby.
class DarkVesselScanner {
 public:
  std::vector<Event> scan(const std::string& source, double t,
                          std::span<const fmv::DetectionRecord> unmatched,
                          const TrackSnapshot& snapshot, const FusionConfig& config);

 private:
  struct Cluster {
    geo::GeoPoint center;
    int consecutive = 0;
    bool emitted = false;
    std::vector<std::string> detection_ids;
  };
  std::map<std::string, std::vector<Cluster>> clusters_;
};

struct FrameFusionResult {
  CorrelationResult correlation;
  std::vector<Event> events;
};

/// Drives correlation, verification and dark-vessel rules, mirroring
/// verification states into the track store.
class FusionEngine {
 public:
  FusionEngine(TrackStore& store, FusionConfig config);

  FrameFusionResult process_frame(const fmv::FrameMeta& frame,
                                  std::span<const fmv::DetectionRecord> records,
                                  double confidence_threshold, const TrackSnapshot& snapshot);
  /// Cue creation for GeofenceEnter events and cue expiry at an epoch.
  std::vector<Event> on_epoch(double t, std::span<const Event> ais_events, const TrackSnapshot& snapshot);
  std::optional<CueTask> manual_cue(Mmsi mmsi, double t, const TrackSnapshot& snapshot, std::string reason);

  std::vector<CueTask> cues() const;
  bool can_manual_cue(Mmsi mmsi) const { return machine_.can_manual_cue(mmsi); }
  const std::deque<CorrelationRecord>& correlations() const { return correlations_; }
  const FusionConfig& config() const { return config_; }
  const VerificationMachine& machine() const { return machine_; }

 private:
  void sync_state(Mmsi mmsi);
  std::vector<Event> check_class_conflicts(std::span<const fmv::DetectionRecord> candidates,
                                           const CorrelationResult& vessel_matches,
                                           const TrackSnapshot& snapshot, double t);

  TrackStore& store_;
  FusionConfig config_;
  VerificationMachine machine_;
  DarkVesselScanner dark_;
  std::set<Mmsi> class_conflicts_;
  std::deque<CorrelationRecord> correlations_;
};

}  // namespace cop::fusion
