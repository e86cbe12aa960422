#include "cop/fusion.hpp"

#include <algorithm>
#include <tuple>

#include "cop/error.hpp"

namespace cop::fusion {

void FusionConfig::validate() const {
  if (!(gate_m > 0 && max_track_age > 0 && dark_frames > 0 && cue_window > 0))
    throw Error(Errc::InvalidConfig, "FusionConfig values must be strictly positive");
  if (vessel_classes.empty()) throw Error(Errc::InvalidConfig, "vessel_classes must be non-empty");
}

std::string_view to_string(CueState s) {
  switch (s) {
    case CueState::Pending: return "Pending";
    case CueState::Active: return "Active";
    case CueState::Completed: return "Completed";
    case CueState::Expired: return "Expired";
  }
  return "Unknown";
}

std::string ship_type_category(int ship_type) {
  return ship_type <= 0 ? "unknown" : "vessel";
}

namespace {

struct Candidate {
  double distance;
  Mmsi mmsi;
  const fmv::DetectionRecord* detection;
};

}  // namespace

CorrelationResult correlate_frame(std::span<const fmv::DetectionRecord> detections,
                                  const TrackSnapshot& snapshot, const FusionConfig& config,
                                  const std::optional<std::array<geo::GeoPoint, 4>>& footprint) {
  std::vector<const fmv::DetectionRecord*> dets;
  for (const auto& d : detections)
    if (d.geolocation && config.is_vessel_class(d.class_label)) dets.push_back(&d);
  std::sort(dets.begin(), dets.end(), [](auto* a, auto* b) { return a->detection_id < b->detection_id; });

  std::vector<const SnapshotEntry*> tracks;
  for (const auto& e : snapshot.entries)
    if (e.staleness >= 0 && e.staleness <= config.max_track_age) tracks.push_back(&e);

  std::vector<Candidate> pairs;
  for (const auto* d : dets)
    for (const auto* t : tracks) {
      const double dist = geo::haversine_distance(*d->geolocation, t->predicted);
      if (dist <= config.gate_m) pairs.push_back({dist, t->mmsi, d});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.distance, a.mmsi, a.detection->detection_id) <
           std::tie(b.distance, b.mmsi, b.detection->detection_id);
  });

  CorrelationResult result;
  std::set<std::string> used_detections;
  std::set<Mmsi> used_tracks;
  for (const auto& c : pairs) {
    if (used_detections.count(c.detection->detection_id) || used_tracks.count(c.mmsi)) continue;
    used_detections.insert(c.detection->detection_id);
    used_tracks.insert(c.mmsi);
    result.matches.push_back({c.detection->detection_id, c.mmsi, c.distance, c.detection->timestamp});
  }
  for (const auto* d : dets)
    if (!used_detections.count(d->detection_id)) result.unmatched_detections.push_back(d->detection_id);
  if (footprint)
    for (const auto* t : tracks)
      if (!used_tracks.count(t->mmsi) && fmv::footprint_contains(*footprint, t->predicted))
        result.unmatched_tracks_in_view.push_back(t->mmsi);
  return result;
}

VerificationState VerificationMachine::state(Mmsi mmsi) const {
  auto it = states_.find(mmsi);
  return it == states_.end() ? VerificationState::Unverified : it->second;
}

std::optional<std::uint64_t> VerificationMachine::live_cue_for(Mmsi mmsi) const {
  for (const auto& [id, cue] : cues_)
    if (cue.subject_mmsi == mmsi && (cue.state == CueState::Pending || cue.state == CueState::Active))
      return id;
  return std::nullopt;
}

std::optional<CueTask> VerificationMachine::open_cue(Mmsi mmsi, const geo::GeoPoint& target, double t,
                                                     std::string reason) {
  CueTask cue;
  cue.cue_id = next_cue_id_++;
  cue.target = target;
  cue.reason = std::move(reason);
  cue.created_at = t;
  cue.deadline = t + cue_window_;
  cue.state = CueState::Pending;
  cue.subject_mmsi = mmsi;
  cues_[cue.cue_id] = cue;
  states_[mmsi] = VerificationState::CuePending;
  return cue;
}

std::optional<CueTask> VerificationMachine::on_geofence_enter(Mmsi mmsi, const geo::GeoPoint& target,
                                                              double t, const std::string& fence_id) {
  if (state(mmsi) != VerificationState::Unverified) return std::nullopt;
  return open_cue(mmsi, target, t, "entered geofence " + fence_id);
}

bool VerificationMachine::can_manual_cue(Mmsi mmsi) const {
  const auto s = state(mmsi);
  return (s == VerificationState::Unverified || s == VerificationState::Flagged) && !live_cue_for(mmsi);
}

std::optional<CueTask> VerificationMachine::manual_cue(Mmsi mmsi, const geo::GeoPoint& target, double t,
                                                       std::string reason) {
  if (!can_manual_cue(mmsi)) return std::nullopt;
  return open_cue(mmsi, target, t, reason.empty() ? "manual cue" : std::move(reason));
}

std::optional<Event> VerificationMachine::on_correlation(const CorrelationRecord& match,
                                                         const geo::GeoPoint& location) {
  if (state(match.mmsi) != VerificationState::CuePending) return std::nullopt;
  const auto cue_id = live_cue_for(match.mmsi);
  if (!cue_id) return std::nullopt;
  auto& cue = cues_.at(*cue_id);
  if (match.timestamp > cue.deadline) return std::nullopt;
  cue.state = CueState::Completed;
  states_[match.mmsi] = VerificationState::Verified;
  return make_event(EventKind::VesselVerified, EventSource::FUSION, match.timestamp, location,
                    {std::to_string(match.mmsi), match.detection_id},
                    {{"cue_id", cue.cue_id}, {"distance_m", match.distance}, {"cue_created_at", cue.created_at}});
}

std::vector<Event> VerificationMachine::on_tick(double t) {
  std::vector<Event> events;
  for (auto& [id, cue] : cues_) {
    if (cue.state != CueState::Pending && cue.state != CueState::Active) continue;
    if (!(cue.deadline < t)) continue;
    cue.state = CueState::Expired;
    if (state(cue.subject_mmsi) == VerificationState::CuePending)
      states_[cue.subject_mmsi] = VerificationState::Flagged;
    events.push_back(make_event(EventKind::VesselMismatch, EventSource::FUSION, t, cue.target,
                                {std::to_string(cue.subject_mmsi)},
                                {{"reason", "cue window elapsed"}, {"cue_id", id}, {"deadline", cue.deadline}}));
  }
  return events;
}

void VerificationMachine::activate(std::uint64_t cue_id) {
  auto it = cues_.find(cue_id);
  if (it != cues_.end() && it->second.state == CueState::Pending) it->second.state = CueState::Active;
}

std::vector<Event> DarkVesselScanner::scan(const std::string& source, double t,
                                           std::span<const fmv::DetectionRecord> unmatched,
                                           const TrackSnapshot& snapshot, const FusionConfig& config) {
  const double radius = 2.0 * config.gate_m;
  std::vector<const fmv::DetectionRecord*> dets;
  for (const auto& d : unmatched) {
    if (!d.geolocation) continue;
    const bool near_track = std::any_of(snapshot.entries.begin(), snapshot.entries.end(), [&](const auto& e) {
      return geo::haversine_distance(e.predicted, *d.geolocation) <= radius;
    });
    if (!near_track) dets.push_back(&d);
  }
  std::sort(dets.begin(), dets.end(), [](auto* a, auto* b) { return a->detection_id < b->detection_id; });

  auto& previous = clusters_[source];
  std::vector<bool> claimed(previous.size(), false);
  std::vector<Cluster> next;
  std::vector<Event> events;
  for (const auto* d : dets) {
    std::optional<std::size_t> best;
    double best_d = radius;
    for (std::size_t i = 0; i < previous.size(); ++i) {
      if (claimed[i]) continue;
      const double dist = geo::haversine_distance(previous[i].center, *d->geolocation);
      if (dist <= best_d) {
        best_d = dist;
        best = i;
      }
    }
    Cluster c;
    if (best) {
      claimed[*best] = true;
      c = std::move(previous[*best]);
    }
    c.center = *d->geolocation;
    ++c.consecutive;
    c.detection_ids.push_back(d->detection_id);
    if (c.detection_ids.size() > static_cast<std::size_t>(config.dark_frames))
      c.detection_ids.erase(c.detection_ids.begin());
    if (c.consecutive >= config.dark_frames && !c.emitted) {
      c.emitted = true;
      events.push_back(make_event(EventKind::DarkVessel, EventSource::FUSION, t, c.center, c.detection_ids,
                                  {{"class_label", d->class_label},
                                   {"frames", c.consecutive},
                                   {"source", source},
                                   {"frame_id", d->frame_id}}));
    }
    next.push_back(std::move(c));
  }
  previous = std::move(next);
  return events;
}

FusionEngine::FusionEngine(TrackStore& store, FusionConfig config)
    : store_(store), config_(std::move(config)), machine_(config_.cue_window) {
  config_.validate();
}

void FusionEngine::sync_state(Mmsi mmsi) {
  try {
    store_.set_verification_state(mmsi, machine_.state(mmsi));
  } catch (const Error&) {
    // evicted track
  }
}

std::vector<Event> FusionEngine::check_class_conflicts(std::span<const fmv::DetectionRecord> candidates,
                                                       const CorrelationResult& vessel_matches,
                                                       const TrackSnapshot& snapshot, double t) {
  std::set<Mmsi> taken;
  for (const auto& m : vessel_matches.matches) taken.insert(m.mmsi);

  std::vector<Candidate> pairs;
  for (const auto& d : candidates)
    for (const auto& e : snapshot.entries) {
      if (taken.count(e.mmsi) || e.staleness < 0 || e.staleness > config_.max_track_age) continue;
      const double dist = geo::haversine_distance(*d.geolocation, e.predicted);
      if (dist <= config_.gate_m) pairs.push_back({dist, e.mmsi, &d});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.distance, a.mmsi, a.detection->detection_id) <
           std::tie(b.distance, b.mmsi, b.detection->detection_id);
  });

  std::vector<Event> events;
  std::set<std::string> used;
  for (const auto& c : pairs) {
    if (used.count(c.detection->detection_id) || taken.count(c.mmsi)) continue;
    used.insert(c.detection->detection_id);
    taken.insert(c.mmsi);
    const auto* entry = snapshot.find(c.mmsi);
    if (!entry->static_info) continue;
    const auto category = ship_type_category(entry->static_info->ship_type);
    if (category != "vessel" || class_conflicts_.count(c.mmsi)) continue;
    class_conflicts_.insert(c.mmsi);
    events.push_back(make_event(EventKind::VesselMismatch, EventSource::FUSION, t, entry->predicted,
                                {std::to_string(c.mmsi), c.detection->detection_id},
                                {{"reason", "class conflict"},
                                 {"detected_class", c.detection->class_label},
                                 {"ais_category", category},
                                 {"ship_type", entry->static_info->ship_type},
                                 {"distance_m", c.distance}}));
  }
  return events;
}

FrameFusionResult FusionEngine::process_frame(const fmv::FrameMeta& frame,
                                              std::span<const fmv::DetectionRecord> records,
                                              double confidence_threshold, const TrackSnapshot& snapshot) {
  FrameFusionResult out;
  const double t = frame.timestamp;

  auto expired = machine_.on_tick(t);
  for (const auto& e : expired) sync_state(static_cast<Mmsi>(std::stoul(e.subjects.front())));
  out.events.insert(out.events.end(), expired.begin(), expired.end());

  std::vector<fmv::DetectionRecord> vessels;
  std::vector<fmv::DetectionRecord> others;
  for (const auto& r : records) {
    if (!r.geolocation || r.confidence < confidence_threshold) continue;
    if (config_.is_vessel_class(r.class_label)) vessels.push_back(r);
    else if (r.class_label != "person") others.push_back(r);
  }

  const auto footprint = fmv::frame_footprint(frame);
  out.correlation = correlate_frame(vessels, snapshot, config_, footprint);

  if (footprint)
    for (const auto& [id, cue] : machine_.cues())
      if (cue.state == CueState::Pending)
        if (const auto* e = snapshot.find(cue.subject_mmsi); e && fmv::footprint_contains(*footprint, e->predicted))
          machine_.activate(id);

  for (const auto& m : out.correlation.matches) {
    correlations_.push_back(m);
    if (correlations_.size() > 100000) correlations_.pop_front();
    const auto* entry = snapshot.find(m.mmsi);
    if (auto ev = machine_.on_correlation(m, entry->predicted)) {
      sync_state(m.mmsi);
      out.events.push_back(std::move(*ev));
    }
  }

  auto conflicts = check_class_conflicts(others, out.correlation, snapshot, t);
  out.events.insert(out.events.end(), conflicts.begin(), conflicts.end());

  std::vector<fmv::DetectionRecord> unmatched;
  const std::set<std::string> unmatched_ids(out.correlation.unmatched_detections.begin(),
                                            out.correlation.unmatched_detections.end());
  for (const auto& v : vessels)
    if (unmatched_ids.count(v.detection_id)) unmatched.push_back(v);
  auto dark = dark_.scan(frame.source, t, unmatched, snapshot, config_);
  out.events.insert(out.events.end(), dark.begin(), dark.end());
  return out;
}

std::vector<Event> FusionEngine::on_epoch(double t, std::span<const Event> ais_events,
                                          const TrackSnapshot& snapshot) {
  for (const auto& e : ais_events) {
    if (e.kind != EventKind::GeofenceEnter) continue;
    const auto mmsi = static_cast<Mmsi>(std::stoul(e.subjects.front()));
    const auto* entry = snapshot.find(mmsi);
    const auto target = entry ? entry->predicted : e.location.value_or(geo::GeoPoint{});
    if (machine_.on_geofence_enter(mmsi, target, t, e.details.value("fence_id", std::string{})))
      sync_state(mmsi);
  }
  auto expired = machine_.on_tick(t);
  for (const auto& e : expired) sync_state(static_cast<Mmsi>(std::stoul(e.subjects.front())));
  return expired;
}

std::optional<CueTask> FusionEngine::manual_cue(Mmsi mmsi, double t, const TrackSnapshot& snapshot,
                                                std::string reason) {
  const auto* entry = snapshot.find(mmsi);
  if (!entry) throw Error(Errc::UnknownMmsi, std::to_string(mmsi));
  auto cue = machine_.manual_cue(mmsi, entry->predicted, t, std::move(reason));
  if (cue) sync_state(mmsi);
  return cue;
}

std::vector<CueTask> FusionEngine::cues() const {
  std::vector<CueTask> out;
  for (const auto& [_, c] : machine_.cues()) out.push_back(c);
  return out;
}

}  // namespace cop::fusion
