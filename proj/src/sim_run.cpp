#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "cop/error.hpp"
#include "cop/json_io.hpp"
#include "cop/simulator.hpp"

namespace cop::sim {

namespace {

using nlohmann::json;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * geo::kPi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

struct Report {
  double t = 0.0;
  Mmsi mmsi = 0;
  VesselState state;
};

struct Detection {
  std::string id;
  Mmsi mmsi = 0;
  bool dark = false;
  std::string class_label;
  double confidence = 0.9;
  geo::GeoPoint truth;
  geo::GeoPoint observed;
};

struct Frame {
  double t = 0.0;
  std::string id;
  std::vector<Detection> detections;
};

bool silenced(const VesselSpec& v, double tau) {
  return std::any_of(v.ais_silences.begin(), v.ais_silences.end(),
                     [&](const Interval& s) { return tau >= s.from && tau < s.to; });
}

geo::GeoPoint offset_m(const geo::GeoPoint& p, double north, double east) {
  return {p.lat + north / geo::meters_per_deg_lat(), p.lon + east / geo::meters_per_deg_lon(p.lat)};
}

/// Signed planar distance to the box boundary: negative outside, positive inside.
double box_depth(const geo::GeoPoint& p, const geo::GeofenceBox& b) {
  const double ky = geo::meters_per_deg_lat();
  const double kx = geo::meters_per_deg_lon(p.lat);
  const double dx = std::max({b.min_lon - p.lon, 0.0, p.lon - b.max_lon}) * kx;
  const double dy = std::max({b.min_lat - p.lat, 0.0, p.lat - b.max_lat}) * ky;
  if (dx > 0 || dy > 0) return -std::hypot(dx, dy);
  return std::min({(p.lat - b.min_lat) * ky, (b.max_lat - p.lat) * ky, (p.lon - b.min_lon) * kx,
                   (b.max_lon - p.lon) * kx});
}

struct Margins {
  std::map<std::string, double> values;
  void note(const std::string& key, double v) {
    v = std::abs(v);
    auto [it, inserted] = values.emplace(key, v);
    if (!inserted) it->second = std::min(it->second, v);
  }
};

/// Rule model over true kinematics, fed in the service's processing order.
class TruthModel {
 public:
  TruthModel(const CopConfig& cfg, const Scenario& sc) : cfg_(cfg) {
    for (const auto& v : sc.vessels) vessels_[v.mmsi];
    fences_ = cfg.geofences;
    std::sort(fences_.begin(), fences_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  }

  std::vector<ExpectedEvent> events;
  json crossings = json::array();
  Margins margins;

  void on_report(const Report& r) {
    auto& v = vessels_[r.mmsi];
    if (v.presence != Presence::Active) {
      emit(r.t, "Appearance", {std::to_string(r.mmsi)});
      v.presence = Presence::Active;
    }
    const auto& ec = cfg_.events;
    if (!(v.last_off && r.t - *v.last_off < ec.horizon_off)) {
      double worst = -1.0;
      for (const auto& p : v.reports) {
        const double age = r.t - p.t;
        if (age < ec.epoch || age > ec.horizon_off) continue;
        const auto predicted = geo::dead_reckon(p.state.position, p.state.cog_deg, p.state.sog_kn, age);
        worst = std::max(worst, geo::haversine_distance(predicted, r.state.position));
      }
      if (worst >= 0) margins.note("off_course_m", worst - ec.theta_off);
      if (worst > ec.theta_off) {
        emit(r.t, "OffCourse", {std::to_string(r.mmsi)});
        v.last_off = r.t;
        for (auto& [key, st] : fence_state_)
          if (key.first == r.mmsi) st.projected = false;
      }
    }
    v.reports.push_back(r);
  }

  void on_frame(double t, const std::vector<Detection>& detections) {
    analytics(t, detections);

    expire_cues(t);

    const auto& fc = cfg_.fusion;
    std::vector<const Detection*> dets;
    for (const auto& d : detections)
      if (d.confidence >= cfg_.confidence_threshold && fc.is_vessel_class(d.class_label)) dets.push_back(&d);
    std::sort(dets.begin(), dets.end(), [](auto* a, auto* b) { return a->id < b->id; });

    struct Pair {
      double d;
      Mmsi mmsi;
      const Detection* det;
    };
    std::vector<Pair> pairs;
    for (const auto* d : dets)
      for (auto& [mmsi, v] : vessels_) {
        const auto pred = predicted(v, t);
        if (!pred || pred->second > fc.max_track_age) continue;
        const double dist = geo::haversine_distance(d->observed, pred->first);
        if (dist <= fc.gate_m) pairs.push_back({dist, mmsi, d});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      return std::tie(a.d, a.mmsi, a.det->id) < std::tie(b.d, b.mmsi, b.det->id);
    });
    std::set<std::string> used_d;
    std::set<Mmsi> used_t;
    for (const auto& p : pairs) {
      if (used_d.count(p.det->id) || used_t.count(p.mmsi)) continue;
      used_d.insert(p.det->id);
      used_t.insert(p.mmsi);
      margins.note("gate_m", p.d - fc.gate_m);
      auto& v = vessels_[p.mmsi];
      if (v.verification == VerificationState::CuePending)
        for (auto& c : cues_)
          if (c.live && c.mmsi == p.mmsi && t <= c.deadline) {
            emit(t, "VesselVerified", {std::to_string(p.mmsi), p.det->id});
            c.live = false;
            v.verification = VerificationState::Verified;
            break;
          }
    }

    std::vector<const Detection*> dark;
    for (const auto* d : dets) {
      if (used_d.count(d->id)) continue;
      bool near = false;
      for (auto& [mmsi, v] : vessels_)
        if (const auto pred = predicted(v, t))
          near = near || geo::haversine_distance(pred->first, d->observed) <= 2.0 * fc.gate_m;
      if (!near) dark.push_back(d);
    }
    std::vector<bool> claimed(clusters_.size(), false);
    std::vector<Cluster> next;
    for (const auto* d : dark) {
      std::optional<std::size_t> best;
      double best_d = 2.0 * fc.gate_m;
      for (std::size_t i = 0; i < clusters_.size(); ++i) {
        if (claimed[i]) continue;
        const double dist = geo::haversine_distance(clusters_[i].center, d->observed);
        if (dist <= best_d) {
          best_d = dist;
          best = i;
        }
      }
      Cluster c;
      if (best) {
        claimed[*best] = true;
        c = clusters_[*best];
      }
      c.center = d->observed;
      c.ids.push_back(d->id);
      if (c.ids.size() > static_cast<std::size_t>(fc.dark_frames)) c.ids.erase(c.ids.begin());
      if (++c.consecutive >= fc.dark_frames && !c.emitted) {
        c.emitted = true;
        emit(t, "DarkVessel", c.ids);
      }
      next.push_back(c);
    }
    clusters_ = std::move(next);
  }

  void on_epoch(double t) {
    const auto& ec = cfg_.events;
    std::vector<std::pair<Mmsi, geo::GeoPoint>> active;
    for (auto& [mmsi, v] : vessels_) {
      const auto pred = predicted(v, t);
      if (!pred || v.presence != Presence::Active) continue;
      const double silence = t - v.reports.back().t;
      margins.note("disappearance_s", silence - ec.t_gone);
      if (silence > ec.t_gone) {
        emit(t, "Disappearance", {std::to_string(mmsi)});
        v.presence = Presence::Gone;
        continue;
      }
      active.emplace_back(mmsi, pred->first);
    }

    std::map<std::pair<Mmsi, Mmsi>, PairState> next;
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double d = geo::haversine_distance(active[i].second, active[j].second);
        if (d < 3.0 * ec.d_coloc) {
          margins.note("colocation_m", d - ec.d_coloc);
          margins.note("colocation_reset_m", d - 2.0 * ec.d_coloc);
        }
        if (d > 2.0 * ec.d_coloc) continue;
        const auto key = std::make_pair(active[i].first, active[j].first);
        auto st = pairs_.count(key) ? pairs_[key] : PairState{};
        if (d <= ec.d_coloc) {
          if (++st.consecutive >= ec.debounce_coloc && !st.fired) {
            st.fired = true;
            emit(t, "Colocation", {std::to_string(key.first), std::to_string(key.second)});
          }
        } else {
          st.consecutive = 0;
        }
        next[key] = st;
      }
    pairs_ = std::move(next);

    std::vector<Mmsi> entered;
    for (auto& [mmsi, v] : vessels_) {
      if (v.presence != Presence::Active) continue;
      const auto pred = predicted(v, t);
      if (!pred) continue;
      for (const auto& fence : fences_) {
        auto& st = fence_state_[{mmsi, fence.id}];
        const double depth = box_depth(pred->first, fence);
        margins.note("fence_m", depth);
        const bool inside = geo::point_in_box(pred->first, fence);
        if (inside && !st.inside) {
          emit(t, "GeofenceEnter", {std::to_string(mmsi)});
          crossings.push_back({{"t", t}, {"mmsi", mmsi}, {"fence_id", fence.id}, {"kind", "Enter"}});
          entered.push_back(mmsi);
          st.projected = false;
        } else if (!inside && st.inside) {
          emit(t, "GeofenceExit", {std::to_string(mmsi)});
          crossings.push_back({{"t", t}, {"mmsi", mmsi}, {"fence_id", fence.id}, {"kind", "Exit"}});
        }
        st.inside = inside;
        if (inside) continue;
        const bool will = projected_entry(v, pred->second, fence);
        if (will && !st.projected) emit(t, "GeofenceProjectedEnter", {std::to_string(mmsi)});
        st.projected = will;
      }
    }

    for (const auto mmsi : entered) {
      auto& v = vessels_[mmsi];
      if (v.verification != VerificationState::Unverified) continue;
      cues_.push_back({mmsi, t + cfg_.fusion.cue_window, true});
      v.verification = VerificationState::CuePending;
    }
    expire_cues(t);
    analytics(t, {});
  }

 private:
  enum class Presence { Never, Active, Gone };
  struct Vessel {
    std::vector<Report> reports;
    Presence presence = Presence::Never;
    std::optional<double> last_off;
    VerificationState verification = VerificationState::Unverified;
  };
  struct PairState {
    int consecutive = 0;
    bool fired = false;
  };
  struct FenceState {
    bool inside = false;
    bool projected = false;
  };
  struct Cue {
    Mmsi mmsi;
    double deadline;
    bool live;
  };
  struct Cluster {
    geo::GeoPoint center;
    int consecutive = 0;
    bool emitted = false;
    std::vector<std::string> ids;
  };
  struct Series {
    std::vector<std::pair<std::int64_t, std::int64_t>> buckets;
  };

  void emit(double t, std::string kind, std::vector<std::string> subjects) {
    events.push_back({t, std::move(kind), std::move(subjects)});
  }

  /// Position dead-reckoned from the last report at or before t, with its staleness.
  std::optional<std::pair<geo::GeoPoint, double>> predicted(const Vessel& v, double t) const {
    const Report* last = nullptr;
    for (const auto& r : v.reports)
      if (r.t <= t) last = &r;
    if (!last) return std::nullopt;
    const double dt = t - last->t;
    return std::make_pair(geo::dead_reckon(last->state.position, last->state.cog_deg, last->state.sog_kn, dt), dt);
  }

  bool projected_entry(const Vessel& v, double staleness, const geo::GeofenceBox& fence) {
    const auto& r = v.reports.back();
    if (!(r.state.sog_kn > 0)) return false;
    const auto& ec = cfg_.events;
    bool will = false;
    double deepest = -std::numeric_limits<double>::infinity();
    for (double dt = ec.proj_step; dt <= ec.horizon_proj + 1e-9; dt += ec.proj_step) {
      const auto p = geo::dead_reckon(r.state.position, r.state.cog_deg, r.state.sog_kn, staleness + dt);
      deepest = std::max(deepest, box_depth(p, fence));
      will = will || geo::point_in_box(p, fence);
    }
    margins.note("projection_m", deepest);
    return will;
  }

  void expire_cues(double t) {
    for (auto& c : cues_)
      if (c.live && c.deadline < t) {
        c.live = false;
        vessels_[c.mmsi].verification = VerificationState::Flagged;
        emit(t, "VesselMismatch", {std::to_string(c.mmsi)});
      }
  }

  void analytics(double t, const std::vector<Detection>& detections) {
    const auto bs = cfg_.bucket_seconds;
    const auto bucket = static_cast<std::int64_t>(std::floor(t / static_cast<double>(bs))) * bs;
    const auto& ac = cfg_.anomaly;
    for (auto& [label, s] : series_) {
      while (s.buckets.back().first < bucket) {
        const std::size_t idx = s.buckets.size() - 1;
        const std::size_t n = std::min<std::size_t>(idx, static_cast<std::size_t>(ac.window));
        if (n >= static_cast<std::size_t>(ac.min_history)) {
          double mean = 0;
          for (std::size_t i = idx - n; i < idx; ++i) mean += static_cast<double>(s.buckets[i].second);
          mean /= static_cast<double>(n);
          double ss = 0;
          for (std::size_t i = idx - n; i < idx; ++i) ss += std::pow(static_cast<double>(s.buckets[i].second) - mean, 2);
          const double sd = std::sqrt(ss / static_cast<double>(n));
          const double x = static_cast<double>(s.buckets[idx].second);
          if (sd > 0 ? std::abs(x - mean) / sd > ac.z_threshold : x != mean)
            emit(static_cast<double>(s.buckets[idx].first + bs), "CountAnomaly", {});
        }
        s.buckets.emplace_back(s.buckets.back().first + bs, 0);
      }
    }
    for (const auto& d : detections) {
      if (d.confidence < cfg_.confidence_threshold) continue;
      auto& s = series_[d.class_label];
      if (s.buckets.empty()) s.buckets.emplace_back(bucket, 0);
      if (s.buckets.back().first == bucket) ++s.buckets.back().second;
    }
  }

  const CopConfig& cfg_;
  std::vector<geo::GeofenceBox> fences_;
  std::map<Mmsi, Vessel> vessels_;
  std::map<std::pair<Mmsi, Mmsi>, PairState> pairs_;
  std::map<std::pair<Mmsi, std::string>, FenceState> fence_state_;
  std::vector<Cue> cues_;
  std::vector<Cluster> clusters_;
  std::map<std::string, Series> series_;
};

StaticFields static_fields(const VesselSpec& v) {
  StaticFields f;
  f.mmsi = v.mmsi;
  f.callsign = v.callsign;
  f.name = v.name;
  f.ship_type = v.ship_type;
  f.to_bow = f.to_stern = static_cast<int>(std::min(511.0, std::round(v.length_m / 2)));
  return f;
}

std::string frame_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%06zu", k);
  return buf;
}

}  // namespace

SimOutput run_scenario(const Scenario& scenario, const CopConfig& base) {
  scenario.validate();
  SimOutput out;
  out.config = base;
  for (const auto& f : scenario.geofences) {
    if (std::any_of(out.config.geofences.begin(), out.config.geofences.end(),
                    [&](const auto& g) { return g.id == f.id; }))
      throw Error(Errc::InvalidScenario, "geofence id clashes with config: " + f.id);
    out.config.geofences.push_back(f);
  }
  out.config.validate();

  const double t0 = scenario.start_time;
  std::vector<const VesselSpec*> vessels;
  for (const auto& v : scenario.vessels) vessels.push_back(&v);
  std::sort(vessels.begin(), vessels.end(), [](auto* a, auto* b) { return a->mmsi < b->mmsi; });
  std::map<Mmsi, Trajectory> paths;
  for (const auto* v : vessels) paths.emplace(v->mmsi, Trajectory(*v));

  // AIS schedule.
  struct AisItem {
    double tau;
    Mmsi mmsi;
    int order;  // 0 position, 1 static
    std::vector<bool> bits;
  };
  std::vector<AisItem> items;
  std::vector<Report> reports;
  json states = json::array();
  for (const auto* v : vessels) {
    const auto& path = paths.at(v->mmsi);
    bool first = true;
    for (std::size_t k = 0;; ++k) {
      const double tau = v->report_offset + static_cast<double>(k) * v->report_interval;
      if (tau > scenario.duration) break;
      const auto st = path.at(tau);
      const bool reported = !v->dark && !silenced(*v, tau);
      states.push_back({{"t", t0 + tau},
                        {"mmsi", v->mmsi},
                        {"lat", st.position.lat},
                        {"lon", st.position.lon},
                        {"sog_kn", st.sog_kn},
                        {"cog_deg", st.cog_deg},
                        {"reported", reported}});
      if (!reported) continue;
      items.push_back({tau, v->mmsi, 0, encode_position(quantize(v->mmsi, t0 + tau, st.position, st.sog_kn, st.cog_deg))});
      reports.push_back({t0 + tau, v->mmsi, st});
      if (first && v->static_interval == 0.0) {
        items.push_back({tau, v->mmsi, 1, encode_static(static_fields(*v))});
      }
      first = false;
    }
    if (v->static_interval > 0 && !v->dark)
      for (std::size_t k = 0;; ++k) {
        const double tau = v->report_offset + static_cast<double>(k) * v->static_interval;
        if (tau > scenario.duration) break;
        if (silenced(*v, tau)) continue;
        items.push_back({tau, v->mmsi, 1, encode_static(static_fields(*v))});
      }
  }
  std::stable_sort(items.begin(), items.end(), [](const AisItem& a, const AisItem& b) {
    return std::tie(a.tau, a.mmsi, a.order) < std::tie(b.tau, b.mmsi, b.order);
  });
  int sequence = 0;
  for (const auto& item : items) {
    const auto lines = to_sentences(item.bits, sequence, 'A', t0 + item.tau);
    if (lines.size() > 1) sequence = (sequence + 1) % 10;
    out.ais_lines.insert(out.ais_lines.end(), lines.begin(), lines.end());
  }

  // Frames and detections.
  std::vector<Frame> frames;
  json detections_truth = json::object();
  if (scenario.uav) {
    const auto& uav = *scenario.uav;
    Rng rng(scenario.seed);
    const double axis_sigma = scenario.detection_noise_sigma / std::sqrt(2.0);
    const double w = uav.camera.image_width, h = uav.camera.image_height;
    for (std::size_t k = 0;; ++k) {
      const double tau = uav.frame_offset + static_cast<double>(k) * uav.frame_interval;
      if (tau > scenario.duration) break;
      Frame frame;
      frame.t = t0 + tau;
      frame.id = frame_name(k);
      json meta = uav_frame(uav, t0, frame.t, frame.id);
      const geo::GeoPoint platform{meta["platform"]["lat"].get<double>(), meta["platform"]["lon"].get<double>()};
      json dets = json::array();
      for (const auto* v : vessels) {
        const auto st = paths.at(v->mmsi).at(tau);
        const double dn = rng.normal() * axis_sigma;
        const double de = rng.normal() * axis_sigma;
        const auto observed = offset_m(st.position, dn, de);
        const auto px_true = project_to_pixel(uav, platform, st.position);
        const auto px = project_to_pixel(uav, platform, observed);
        const auto in_image = [&](const std::optional<std::array<double, 2>>& q) {
          return q && (*q)[0] >= 1 && (*q)[0] <= w - 1 && (*q)[1] >= 1 && (*q)[1] <= h - 1;
        };
        if (!in_image(px_true) || !in_image(px)) continue;
        const double east = (observed.lon - platform.lon) * geo::meters_per_deg_lon(platform.lat);
        const double north = (observed.lat - platform.lat) * geo::meters_per_deg_lat();
        const double range = std::sqrt(east * east + north * north + uav.altitude_m * uav.altitude_m);
        const double gsd = range * 2.0 * std::tan(geo::deg2rad(uav.camera.hfov) / 2) / w;
        const double u = (*px)[0], vv = (*px)[1];
        const double half_w = std::min({std::max(1.0, v->length_m / (2 * gsd)), u, w - u});
        const double half_h = std::min({std::max(1.0, 0.6 * v->length_m / (2 * gsd)), vv, h - vv});
        Detection d;
        char id[48];
        std::snprintf(id, sizeof id, "%s-d%02zu", frame.id.c_str(), frame.detections.size());
        d.id = id;
        d.mmsi = v->mmsi;
        d.dark = v->dark;
        d.class_label = v->class_label;
        d.truth = st.position;
        d.observed = observed;
        dets.push_back({{"detection_id", d.id},
                        {"class_label", d.class_label},
                        {"confidence", d.confidence},
                        {"bbox", {{"x_min", u - half_w}, {"y_min", vv - half_h}, {"x_max", u + half_w}, {"y_max", vv + half_h}}}});
        detections_truth[d.id] = {{"mmsi", d.mmsi},
                                  {"dark", d.dark},
                                  {"frame_id", frame.id},
                                  {"t", frame.t},
                                  {"true", d.truth},
                                  {"observed", d.observed}};
        frame.detections.push_back(std::move(d));
      }
      out.fmv_lines.push_back(json{{"frame", meta}, {"detections", dets}}.dump());
      frames.push_back(std::move(frame));
    }
  }

  // Expected events in processing order: reports, then frames, then epochs.
  TruthModel model(out.config, scenario);
  double first = std::numeric_limits<double>::infinity(), last = -first;
  for (const auto& item : items) first = std::min(first, t0 + item.tau), last = std::max(last, t0 + item.tau);
  for (const auto& f : frames) first = std::min(first, f.t), last = std::max(last, f.t);
  struct Step {
    double t;
    int phase;
    std::size_t index;
  };
  std::vector<Step> steps;
  for (std::size_t i = 0; i < reports.size(); ++i) steps.push_back({reports[i].t, 0, i});
  for (std::size_t i = 0; i < frames.size(); ++i) steps.push_back({frames[i].t, 1, i});
  if (std::isfinite(first)) {
    const double epoch = out.config.events.epoch;
    for (double T = std::ceil(first / epoch) * epoch; T <= last; T += epoch) steps.push_back({T, 2, 0});
  }
  std::stable_sort(steps.begin(), steps.end(),
                   [](const Step& a, const Step& b) { return std::tie(a.t, a.phase) < std::tie(b.t, b.phase); });
  for (const auto& s : steps) {
    if (s.phase == 0) model.on_report(reports[s.index]);
    else if (s.phase == 1) model.on_frame(frames[s.index].t, frames[s.index].detections);
    else model.on_epoch(s.t);
  }
  out.expected_events = model.events;

  json expected = json::array();
  for (const auto& e : out.expected_events) expected.push_back({{"t", e.t}, {"kind", e.kind}, {"subjects", e.subjects}});
  json margins = json::object();
  for (const auto& [k, v] : model.margins.values) margins[k] = v;
  json dark = json::array();
  for (const auto* v : vessels)
    if (v->dark) dark.push_back(v->mmsi);
  out.truth = {{"scenario", scenario.name},
               {"seed", scenario.seed},
               {"start_time", t0},
               {"duration", scenario.duration},
               {"ais_sentences", out.ais_lines.size()},
               {"position_reports", reports.size()},
               {"frames", frames.size()},
               {"dark_mmsis", dark},
               {"vessel_states", states},
               {"detections", detections_truth},
               {"crossings", model.crossings},
               {"expected_events", expected},
               {"decision_margins", margins}};
  return out;
}

void write_outputs(const SimOutput& out, const Scenario& scenario, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const auto& fn) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::StorageFailure, "cannot write " + (dir / name).string());
    fn(f);
  };
  write("ais.nmea", [&](std::ostream& f) {
    for (const auto& l : out.ais_lines) f << l << '\n';
  });
  write("fmv.ndjson", [&](std::ostream& f) {
    for (const auto& l : out.fmv_lines) f << l << '\n';
  });
  write("truth.json", [&](std::ostream& f) { f << out.truth.dump(2) << '\n'; });
  write("config.json", [&](std::ostream& f) { f << config_to_json(out.config).dump(2) << '\n'; });
  write("scenario.json", [&](std::ostream& f) { f << scenario_to_json(scenario).dump(2) << '\n'; });
}

}  // namespace cop::sim
