#include "cop/ais_events.hpp"

#include <algorithm>
#include <cmath>

#include "cop/error.hpp"

namespace cop {

void EventConfig::validate() const {
  if (!(t_gone > 0 && theta_off > 0 && horizon_off > 0 && d_coloc > 0 && debounce_coloc > 0 &&
        epoch > 0 && horizon_proj > 0 && proj_step > 0))
    throw Error(Errc::InvalidConfig, "EventConfig values must be strictly positive");
}

AisEventEngine::AisEventEngine(TrackStore& store, EventConfig config)
    : store_(store), config_(config) {
  config_.validate();
}

std::vector<Event> AisEventEngine::on_new_latest(const ais::AisPositionReport& report,
                                                 const TrackDelta& delta) {
  std::vector<Event> events;
  const auto track = store_.track_since(report.mmsi, report.timestamp - config_.horizon_off);
  if (!track) return events;
  const auto subject = std::to_string(report.mmsi);

  if (delta.created || track->presence == Presence::Disappeared) {
    if (track->presence == Presence::Disappeared) store_.set_presence(report.mmsi, Presence::Active);
    events.push_back(make_event(EventKind::Appearance, EventSource::AIS, report.timestamp,
                                report.position(), {subject},
                                {{"reappearance", !delta.created}}));
  }
  if (auto off = check_off_course(report, *track)) events.push_back(std::move(*off));
  return events;
}

std::optional<Event> AisEventEngine::check_off_course(const ais::AisPositionReport& report,
                                                      const Track& track) {
  if (auto it = last_off_course_.find(report.mmsi);
      it != last_off_course_.end() && report.timestamp - it->second < config_.horizon_off)
    return std::nullopt;

  const auto actual = *report.position();
  double worst = -1.0;
  const ais::AisPositionReport* worst_prior = nullptr;
  geo::GeoPoint worst_predicted{};
  for (const auto& prior : track.reports) {
    const double age = report.timestamp - prior.timestamp;
    if (age < config_.epoch) break;  // reports are time-ordered; the rest are younger
    if (age > config_.horizon_off || !prior.has_kinematics()) continue;
    const auto predicted = geo::dead_reckon(*prior.position(), *prior.cog, *prior.sog, age);
    const double deviation = geo::haversine_distance(actual, predicted);
    if (deviation > worst) {
      worst = deviation;
      worst_prior = &prior;
      worst_predicted = predicted;
    }
  }
  if (!worst_prior || worst <= config_.theta_off) return std::nullopt;

  last_off_course_[report.mmsi] = report.timestamp;
  for (auto& [key, state] : fence_states_)
    if (key.first == report.mmsi) state.projected = false;

  return make_event(EventKind::OffCourse, EventSource::AIS, report.timestamp, actual,
                    {std::to_string(report.mmsi)},
                    {{"deviation_m", worst},
                     {"prior_time", worst_prior->timestamp},
                     {"predicted", {{"lat", worst_predicted.lat}, {"lon", worst_predicted.lon}}}});
}

std::vector<Event> AisEventEngine::on_epoch(double t, const TrackSnapshot& snapshot) {
  std::vector<Event> events;

  std::vector<const SnapshotEntry*> active;
  for (const auto& e : snapshot.entries) {
    if (e.presence != Presence::Active) continue;
    if (t - e.last_report.timestamp > config_.t_gone) {
      store_.set_presence(e.mmsi, Presence::Disappeared);
      const auto last = *e.last_report.position();
      events.push_back(make_event(EventKind::Disappearance, EventSource::AIS, t, e.predicted,
                                  {std::to_string(e.mmsi)},
                                  {{"last_seen", e.last_report.timestamp},
                                   {"silence_s", t - e.last_report.timestamp},
                                   {"last_position", {{"lat", last.lat}, {"lon", last.lon}}}}));
      continue;
    }
    active.push_back(&e);
  }

  // Sweep in latitude order; pairs farther apart than the hysteresis radius
  // lose their state, which is equivalent to resetting the episode.
  const double reset_radius = 2.0 * config_.d_coloc;
  const double lat_window = reset_radius / geo::meters_per_deg_lat();
  std::vector<const SnapshotEntry*> by_lat = active;
  std::sort(by_lat.begin(), by_lat.end(), [](const SnapshotEntry* a, const SnapshotEntry* b) {
    if (a->predicted.lat != b->predicted.lat) return a->predicted.lat < b->predicted.lat;
    return a->mmsi < b->mmsi;
  });

  std::map<std::pair<Mmsi, Mmsi>, PairState> next_pairs;
  std::vector<std::pair<std::pair<Mmsi, Mmsi>, const SnapshotEntry*>> fired;
  for (std::size_t i = 0; i < by_lat.size(); ++i) {
    for (std::size_t j = i + 1; j < by_lat.size(); ++j) {
      if (by_lat[j]->predicted.lat - by_lat[i]->predicted.lat > lat_window) break;
      const auto* a = by_lat[i];
      const auto* b = by_lat[j];
      if (a->mmsi == b->mmsi) continue;
      const auto key = std::minmax(a->mmsi, b->mmsi);
      const double d = geo::haversine_distance(a->predicted, b->predicted);
      if (d > reset_radius) continue;
      PairState state;
      if (auto it = pairs_.find(key); it != pairs_.end()) state = it->second;
      if (d <= config_.d_coloc) {
        ++state.consecutive;
        if (state.consecutive >= config_.debounce_coloc && !state.fired) {
          state.fired = true;
          fired.emplace_back(key, a->mmsi == key.first ? a : b);
        }
      } else {
        state.consecutive = 0;
      }
      next_pairs[key] = state;
    }
  }
  pairs_ = std::move(next_pairs);

  std::sort(fired.begin(), fired.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [key, first] : fired) {
    const auto* second = snapshot.find(key.second);
    events.push_back(make_event(
        EventKind::Colocation, EventSource::AIS, t, first->predicted,
        {std::to_string(key.first), std::to_string(key.second)},
        {{"distance_m", geo::haversine_distance(first->predicted, second->predicted)},
         {"epochs", config_.debounce_coloc}}));
  }
  return events;
}

bool AisEventEngine::projected_entry(const SnapshotEntry& entry, const geo::GeofenceBox& fence) const {
  const auto& r = entry.last_report;
  if (!r.has_kinematics() || *r.sog <= 0.0) return false;
  const auto origin = *r.position();
  for (double dt = config_.proj_step; dt <= config_.horizon_proj + 1e-9; dt += config_.proj_step) {
    const auto p = geo::dead_reckon(origin, *r.cog, *r.sog, entry.staleness + dt);
    if (geo::point_in_box(p, fence)) return true;
  }
  return false;
}

std::vector<Event> AisEventEngine::evaluate_geofences(double t, const TrackSnapshot& snapshot,
                                                      const std::vector<geo::GeofenceBox>& fences) {
  std::set<std::string> live;
  for (const auto& f : fences) live.insert(f.id);
  for (auto it = fence_states_.begin(); it != fence_states_.end();) {
    if (!live.count(it->first.second)) {
      ++unknown_fence_skips_;
      it = fence_states_.erase(it);
    } else {
      ++it;
    }
  }

  std::vector<const geo::GeofenceBox*> ordered;
  for (const auto& f : fences) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<Event> events;
  for (const auto& e : snapshot.entries) {
    if (e.presence != Presence::Active) continue;
    const auto subject = std::to_string(e.mmsi);
    for (const auto* fence : ordered) {
      auto& state = fence_states_[{e.mmsi, fence->id}];
      const bool inside = geo::point_in_box(e.predicted, *fence);
      const nlohmann::json details{{"fence_id", fence->id}};
      if (inside && !state.inside) {
        events.push_back(make_event(EventKind::GeofenceEnter, EventSource::AIS, t, e.predicted, {subject}, details));
        state.projected = false;
      } else if (!inside && state.inside) {
        events.push_back(make_event(EventKind::GeofenceExit, EventSource::AIS, t, e.predicted, {subject}, details));
      }
      state.inside = inside;
      if (inside) continue;

      const bool will_enter = projected_entry(e, *fence);
      if (will_enter && !state.projected) {
        auto d = details;
        d["horizon_s"] = config_.horizon_proj;
        events.push_back(
            make_event(EventKind::GeofenceProjectedEnter, EventSource::AIS, t, e.predicted, {subject}, d));
      }
      state.projected = will_enter;
    }
  }
  return events;
}

void AisEventEngine::forget_fence(const std::string& fence_id) {
  for (auto it = fence_states_.begin(); it != fence_states_.end();)
    it = it->first.second == fence_id ? fence_states_.erase(it) : std::next(it);
}

void AisEventEngine::forget_track(Mmsi mmsi) {
  last_off_course_.erase(mmsi);
  for (auto it = fence_states_.begin(); it != fence_states_.end();)
    it = it->first.first == mmsi ? fence_states_.erase(it) : std::next(it);
  for (auto it = pairs_.begin(); it != pairs_.end();)
    it = (it->first.first == mmsi || it->first.second == mmsi) ? pairs_.erase(it) : std::next(it);
}

}  // namespace cop
