#include "cop/track_store.hpp"

#include <algorithm>
#include <mutex>

#include "cop/error.hpp"

namespace cop {

std::string_view to_string(VerificationState s) {
  switch (s) {
    case VerificationState::Unverified: return "Unverified";
    case VerificationState::CuePending: return "CuePending";
    case VerificationState::Verified: return "Verified";
    case VerificationState::Flagged: return "Flagged";
  }
  return "Unknown";
}

std::string_view to_string(Presence p) {
  return p == Presence::Active ? "Active" : "Disappeared";
}

const SnapshotEntry* TrackSnapshot::find(Mmsi mmsi) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), mmsi,
                             [](const SnapshotEntry& e, Mmsi m) { return e.mmsi < m; });
  if (it == entries.end() || it->mmsi != mmsi) return nullptr;
  return &*it;
}

Prediction predict_from(const ais::AisPositionReport& report, double t) {
  Prediction p;
  p.report_time = report.timestamp;
  p.staleness = t - report.timestamp;
  const auto pos = *report.position();
  if (!report.has_kinematics()) {
    p.position = pos;
    p.held = true;
    return p;
  }
  p.position = geo::dead_reckon(pos, *report.cog, *report.sog, p.staleness);
  return p;
}

namespace {

const ais::AisPositionReport* newest_at_or_before(const Track& track, double t) {
  auto it = std::upper_bound(track.reports.begin(), track.reports.end(), t,
                             [](double v, const ais::AisPositionReport& r) { return v < r.timestamp; });
  if (it == track.reports.begin()) return nullptr;
  return &*std::prev(it);
}

}  // namespace

TrackDelta TrackStore::ingest_report(const ais::AisPositionReport& report) {
  if (!report.position()) throw Error(Errc::InvalidArgument, "position report without a position");
  std::unique_lock lock(mu_);
  TrackDelta delta;
  auto [it, inserted] = tracks_.try_emplace(report.mmsi);
  Track& track = it->second;
  if (inserted) {
    track.mmsi = report.mmsi;
    if (auto ps = pending_static_.find(report.mmsi); ps != pending_static_.end()) {
      track.static_info = ps->second;
      pending_static_.erase(ps);
    }
    delta.created = true;
  }
  auto pos = std::lower_bound(track.reports.begin(), track.reports.end(), report.timestamp,
                              [](const ais::AisPositionReport& r, double t) { return r.timestamp < t; });
  if (pos != track.reports.end() && pos->timestamp == report.timestamp) return delta;
  delta.is_new_latest = pos == track.reports.end();
  track.reports.insert(pos, report);
  track.last_seen = track.reports.back().timestamp;
  ++version_;
  return delta;
}

void TrackStore::ingest_static(const ais::AisStaticReport& report) {
  std::unique_lock lock(mu_);
  if (auto it = tracks_.find(report.mmsi); it != tracks_.end()) {
    it->second.static_info = report;
  } else {
    pending_static_[report.mmsi] = report;
  }
  ++version_;
}

Prediction TrackStore::predict_position(Mmsi mmsi, double t) const {
  std::shared_lock lock(mu_);
  auto it = tracks_.find(mmsi);
  if (it == tracks_.end()) throw Error(Errc::UnknownMmsi, std::to_string(mmsi));
  const auto* report = newest_at_or_before(it->second, t);
  if (!report) throw Error(Errc::NoReportBefore, "no report at or before t=" + std::to_string(t));
  return predict_from(*report, t);
}

TrackSnapshot TrackStore::snapshot(double t) const {
  std::shared_lock lock(mu_);
  TrackSnapshot snap;
  snap.as_of = t;
  snap.version = version_;
  snap.entries.reserve(tracks_.size());
  for (const auto& [mmsi, track] : tracks_) {
    const auto* report = newest_at_or_before(track, t);
    if (!report) continue;
    const auto pred = predict_from(*report, t);
    SnapshotEntry e;
    e.mmsi = mmsi;
    e.last_report = *report;
    e.predicted = pred.position;
    e.staleness = pred.staleness;
    e.held = pred.held;
    e.verification_state = track.verification_state;
    e.presence = track.presence;
    e.static_info = track.static_info;
    snap.entries.push_back(std::move(e));
  }
  return snap;
}

std::optional<Track> TrackStore::track(Mmsi mmsi) const {
  std::shared_lock lock(mu_);
  auto it = tracks_.find(mmsi);
  if (it == tracks_.end()) return std::nullopt;
  return it->second;
}

std::optional<Track> TrackStore::track_since(Mmsi mmsi, double since) const {
  std::shared_lock lock(mu_);
  auto it = tracks_.find(mmsi);
  if (it == tracks_.end()) return std::nullopt;
  const Track& src = it->second;
  Track out;
  out.mmsi = src.mmsi;
  out.static_info = src.static_info;
  out.last_seen = src.last_seen;
  out.verification_state = src.verification_state;
  out.presence = src.presence;
  auto first = std::lower_bound(src.reports.begin(), src.reports.end(), since,
                                [](const ais::AisPositionReport& r, double t) { return r.timestamp < t; });
  out.reports.assign(first, src.reports.end());
  return out;
}

std::vector<Mmsi> TrackStore::mmsis() const {
  std::shared_lock lock(mu_);
  std::vector<Mmsi> out;
  out.reserve(tracks_.size());
  for (const auto& [m, _] : tracks_) out.push_back(m);
  return out;
}

std::size_t TrackStore::size() const {
  std::shared_lock lock(mu_);
  return tracks_.size();
}

std::uint64_t TrackStore::version() const {
  std::shared_lock lock(mu_);
  return version_;
}

void TrackStore::set_verification_state(Mmsi mmsi, VerificationState state) {
  std::unique_lock lock(mu_);
  auto it = tracks_.find(mmsi);
  if (it == tracks_.end()) throw Error(Errc::UnknownMmsi, std::to_string(mmsi));
  if (it->second.verification_state != state) {
    it->second.verification_state = state;
    ++version_;
  }
}

void TrackStore::set_presence(Mmsi mmsi, Presence presence) {
  std::unique_lock lock(mu_);
  auto it = tracks_.find(mmsi);
  if (it == tracks_.end()) throw Error(Errc::UnknownMmsi, std::to_string(mmsi));
  if (it->second.presence != presence) {
    it->second.presence = presence;
    ++version_;
  }
}

std::vector<Track> TrackStore::evict_silent(double now, double max_silence_s) {
  std::unique_lock lock(mu_);
  std::vector<Track> evicted;
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    if (now - it->second.last_seen > max_silence_s) {
      evicted.push_back(std::move(it->second));
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }
  if (!evicted.empty()) {
    archived_ += evicted.size();
    ++version_;
  }
  return evicted;
}

std::size_t TrackStore::archived_count() const {
  std::shared_lock lock(mu_);
  return archived_;
}

}  // namespace cop
