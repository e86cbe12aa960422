#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <vector>

#include "cop/ais.hpp"
#include "cop/geo.hpp"
#include "cop/shared_mutex.hpp"

namespace cop {

using ais::Mmsi;

enum class VerificationState { Unverified, CuePending, Verified, Flagged };
enum class Presence { Active, Disappeared };

std::string_view to_string(VerificationState s);
std::string_view to_string(Presence p);

struct Track {
  Mmsi mmsi = 0;
  std::vector<ais::AisPositionReport> reports;  // strictly increasing timestamps
  std::optional<ais::AisStaticReport> static_info;
  double last_seen = 0.0;
  VerificationState verification_state = VerificationState::Unverified;
  Presence presence = Presence::Active;
};

struct TrackDelta {
  bool created = false;
  bool is_new_latest = false;
};

struct Prediction {
  geo::GeoPoint position;
  double staleness = 0.0;
  /// Kinematics were unavailable; position is the last report's.
  bool held = false;
  double report_time = 0.0;
};

struct SnapshotEntry {
  Mmsi mmsi = 0;
  ais::AisPositionReport last_report;
  geo::GeoPoint predicted;
  double staleness = 0.0;
  bool held = false;
  VerificationState verification_state = VerificationState::Unverified;
  Presence presence = Presence::Active;
  std::optional<ais::AisStaticReport> static_info;
};

/// Immutable view over every track that has a report at or before `as_of`,
/// ordered by MMSI.
struct TrackSnapshot {
  double as_of = 0.0;
  std::uint64_t version = 0;
  std::vector<SnapshotEntry> entries;

  const SnapshotEntry* find(Mmsi mmsi) const;
};

/// Prediction from one report, shared by the store and snapshot builders.
Prediction predict_from(const ais::AisPositionReport& report, double t);

/// Per-MMSI report histories. Single writer, many readers: every method is
/// internally synchronized and snapshots are plain values.
class TrackStore {
 public:
  /// Throws Error(InvalidArgument) for a report without a position.
  TrackDelta ingest_report(const ais::AisPositionReport& report);
  /// Static data for an unknown MMSI is held until its first position report.
  void ingest_static(const ais::AisStaticReport& report);

  /// Throws Error(UnknownMmsi) or Error(NoReportBefore).
  Prediction predict_position(Mmsi mmsi, double t) const;
  TrackSnapshot snapshot(double t) const;

  std::optional<Track> track(Mmsi mmsi) const;
  /// Like track() but only reports with timestamp >= `since` are copied.
  std::optional<Track> track_since(Mmsi mmsi, double since) const;
  std::vector<Mmsi> mmsis() const;
  std::size_t size() const;
  std::uint64_t version() const;

  void set_verification_state(Mmsi mmsi, VerificationState state);
  void set_presence(Mmsi mmsi, Presence presence);

  /// Archives tracks silent for longer than `max_silence_s` at `now`.
  std::vector<Track> evict_silent(double now, double max_silence_s);
  std::size_t archived_count() const;

 private:
  mutable SharedMutex mu_;
  std::map<Mmsi, Track> tracks_;
  std::map<Mmsi, ais::AisStaticReport> pending_static_;
  std::uint64_t version_ = 0;
  std::size_t archived_ = 0;
};

}  // namespace cop
