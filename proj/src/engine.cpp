#include "cop/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "cop/error.hpp"
#include "cop/json_io.hpp"

namespace cop {

namespace {

constexpr std::pair<InputKind, std::string_view> kInputKinds[] = {
    {InputKind::Ais, "ais"},
    {InputKind::Fmv, "fmv"},
    {InputKind::Feature, "feature"},
    {InputKind::Tick, "tick"},
    {InputKind::GeofenceAdd, "geofence_add"},
    {InputKind::GeofenceDelete, "geofence_delete"},
    {InputKind::Cue, "cue"},
};

}  // namespace

std::string_view to_string(InputKind kind) {
  for (const auto& [k, name] : kInputKinds)
    if (k == kind) return name;
  return "unknown";
}

std::optional<InputKind> parse_input_kind(std::string_view name) {
  for (const auto& [k, n] : kInputKinds)
    if (n == name) return k;
  return std::nullopt;
}

nlohmann::json to_json(const InputRecord& r) {
  nlohmann::json j{{"t", r.t}, {"kind", to_string(r.kind)}};
  if (r.kind == InputKind::Ais) j["line"] = r.line;
  else if (r.kind != InputKind::Tick) j["payload"] = r.payload;
  return j;
}

InputRecord parse_input_record(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    InputRecord r;
    r.t = j.at("t").get<double>();
    if (!std::isfinite(r.t)) throw Error(Errc::CorruptInputRecord, "non-finite time");
    const auto kind = parse_input_kind(j.at("kind").get<std::string>());
    if (!kind) throw Error(Errc::CorruptInputRecord, "unknown input kind");
    r.kind = *kind;
    if (r.kind == InputKind::Ais) r.line = j.at("line").get<std::string>();
    else if (r.kind != InputKind::Tick) r.payload = j.at("payload");
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptInputRecord, e.what());
  }
}

FrameRecord parse_frame_record(const nlohmann::json& j) {
  try {
    FrameRecord out;
    if (j.contains("frame")) {
      out.frame = j.at("frame").get<fmv::FrameMeta>();
    } else {
      out.frame = j.get<fmv::FrameMeta>();
    }
    if (j.contains("detections")) {
      for (const auto& d : j.at("detections")) {
        auto input = d.get<fmv::DetectionInput>();
        if (d.contains("feature_values") && !d.at("feature_values").is_null())
          out.feature_values[input.detection_id] = d.at("feature_values").get<std::vector<double>>();
        out.detections.push_back(std::move(input));
      }
    }
    return out;
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptInputRecord, std::string("frame record: ") + e.what());
  }
}

CopEngine::CopEngine(CopConfig config) : CopEngine(std::move(config), Options{}) {}

CopEngine::CopEngine(CopConfig config, Options options)
    : config_((config.validate(), std::move(config))),
      options_(std::move(options)),
      log_(options_.log_dir ? std::optional(*options_.log_dir / "events.ndjson") : std::nullopt,
           options_.wall_clock),
      decoder_(config_.fragment_max_age),
      ais_events_(store_, config_.events),
      fmv_(config_.confidence_threshold),
      fusion_(store_, config_.fusion),
      analytics_(config_.bucket_seconds, config_.anomaly, config_.confidence_threshold),
      vectors_(config_.feature_dim),
      fences_(config_.geofences) {
  if (options_.log_dir && options_.record_inputs) {
    const auto path = *options_.log_dir / "inputs.ndjson";
    inputs_ = std::fopen(path.c_str(), "ab");
    if (!inputs_) throw Error(Errc::StorageFailure, "cannot open input log " + path.string());
  }
}

CopEngine::~CopEngine() {
  log_.close();
  if (inputs_) std::fclose(inputs_);
}

void CopEngine::process(InputRecord record) {
  std::unique_lock lock(mu_);
  apply_locked(std::move(record));
}

void CopEngine::tick(double t) {
  InputRecord r;
  r.t = t;
  r.kind = InputKind::Tick;
  process(std::move(r));
}

void CopEngine::finish() {
  std::unique_lock lock(mu_);
  if (halted_) throw Error(Errc::StorageFailure, "engine halted");
  if (started_) run_epochs_before_locked(clock_, true);
}

CopEngine::ApplyResult CopEngine::apply_locked(InputRecord record) {
  if (halted_) throw Error(Errc::StorageFailure, "engine halted");
  if (!std::isfinite(record.t)) {
    ++counters_.corrupt_inputs;
    return {};
  }
  record.t = started_ ? std::max(clock_, record.t) : record.t;
  if (!started_) {
    started_ = true;
    clock_ = record.t;
    next_epoch_ = std::ceil(record.t / config_.events.epoch) * config_.events.epoch;
  }
  record_input_locked(record);
  run_epochs_before_locked(record.t, false);
  clock_ = record.t;
  ++counters_.inputs;

  ApplyResult result;
  switch (record.kind) {
    case InputKind::Ais: apply_ais_locked(record); break;
    case InputKind::Fmv: apply_fmv_locked(record); break;
    case InputKind::Feature: apply_feature_locked(record.payload); break;
    case InputKind::Tick: break;
    default: result = apply_control_locked(record); break;
  }
  return result;
}

void CopEngine::record_input_locked(const InputRecord& r) {
  if (!inputs_) return;
  const std::string line = to_json(r).dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), inputs_) != line.size() || std::fflush(inputs_) != 0) {
    halted_ = true;
    throw Error(Errc::StorageFailure, "input log write failed");
  }
}

void CopEngine::run_epochs_before_locked(double t, bool inclusive) {
  while (inclusive ? next_epoch_ <= t : next_epoch_ < t) {
    run_epoch_locked(next_epoch_);
    next_epoch_ += config_.events.epoch;
  }
}

void CopEngine::run_epoch_locked(double t) {
  ++counters_.epochs;
  decoder_.expire(t);
  std::vector<Event> events = ais_events_.on_epoch(t, store_.snapshot(t));
  const auto snapshot = store_.snapshot(t);
  auto fence_events = ais_events_.evaluate_geofences(t, snapshot, fences_);
  auto fusion_events = fusion_.on_epoch(t, fence_events, snapshot);
  events.insert(events.end(), fence_events.begin(), fence_events.end());
  events.insert(events.end(), fusion_events.begin(), fusion_events.end());
  // Buckets close on the clock, not only when the next frame arrives.
  auto counts = analytics_.advance_to(t);
  events.insert(events.end(), counts.begin(), counts.end());
  for (const auto& track : store_.evict_silent(t, config_.track_eviction)) {
    ais_events_.forget_track(track.mmsi);
    ++counters_.evicted_tracks;
  }
  publish_locked(events);
}

void CopEngine::apply_ais_locked(const InputRecord& r) {
  const auto decoded = decoder_.decode_line(r.line, r.t);
  if (!decoded) return;
  if (const auto* stat = std::get_if<ais::AisStaticReport>(&*decoded)) {
    store_.ingest_static(*stat);
    return;
  }
  const auto& report = std::get<ais::AisPositionReport>(*decoded);
  if (!report.position()) {
    ++counters_.reports_without_position;
    return;
  }
  const auto delta = store_.ingest_report(report);
  if (!delta.is_new_latest) return;
  auto events = ais_events_.on_new_latest(report, delta);
  publish_locked(events);
}

void CopEngine::apply_fmv_locked(const InputRecord& r) {
  FrameRecord frame;
  try {
    frame = parse_frame_record(r.payload);
    fmv::validate(frame.frame);
  } catch (const Error&) {
    ++counters_.corrupt_inputs;
    return;
  }
  ++counters_.frames;
  auto result = fmv_.ingest_detection_frame(frame.frame, frame.detections);
  for (const auto& rec : result.records) {
    const auto it = frame.feature_values.find(rec.detection_id);
    if (it == frame.feature_values.end()) continue;
    try {
      vectors_.add_vector(rec.feature_id.value_or(rec.detection_id), it->second,
                          {rec.detection_id, rec.class_label, rec.timestamp});
      ++counters_.features;
    } catch (const Error&) {
      ++counters_.rejected_features;
    }
  }
  std::vector<Event> events = std::move(result.events);
  auto counts = analytics_.observe(frame.frame.timestamp, result.records);
  events.insert(events.end(), counts.begin(), counts.end());
  auto fused = fusion_.process_frame(frame.frame, result.records, config_.confidence_threshold,
                                     store_.snapshot(frame.frame.timestamp));
  events.insert(events.end(), fused.events.begin(), fused.events.end());
  publish_locked(events);
}

void CopEngine::apply_feature_locked(const nlohmann::json& payload) {
  try {
    const auto id = payload.at("feature_id").get<std::string>();
    const auto values = payload.at("values").get<std::vector<double>>();
    similarity::FeatureMetadata meta;
    if (payload.contains("metadata") && !payload.at("metadata").is_null())
      meta = payload.at("metadata").get<similarity::FeatureMetadata>();
    vectors_.add_vector(id, values, meta);
    ++counters_.features;
  } catch (const Error&) {
    ++counters_.rejected_features;
  } catch (const std::exception&) {
    ++counters_.corrupt_inputs;
  }
}

CopEngine::ApplyResult CopEngine::apply_control_locked(const InputRecord& r) {
  ApplyResult result;
  try {
    switch (r.kind) {
      case InputKind::GeofenceAdd: {
        auto fence = r.payload.get<geo::GeofenceBox>();
        geo::validate(fence);
        const bool dup = std::any_of(fences_.begin(), fences_.end(),
                                     [&](const geo::GeofenceBox& f) { return f.id == fence.id; });
        if (dup) throw Error(Errc::Conflict, "duplicate geofence id " + fence.id);
        fences_.push_back(std::move(fence));
        break;
      }
      case InputKind::GeofenceDelete: {
        const auto id = r.payload.at("id").get<std::string>();
        const auto it = std::find_if(fences_.begin(), fences_.end(),
                                     [&](const geo::GeofenceBox& f) { return f.id == id; });
        if (it == fences_.end()) throw Error(Errc::UnknownFence, id);
        fences_.erase(it);
        ais_events_.forget_fence(id);
        break;
      }
      case InputKind::Cue: {
        const auto mmsi = r.payload.at("mmsi").get<Mmsi>();
        result.cue = fusion_.manual_cue(mmsi, r.t, store_.snapshot(r.t), r.payload.value("reason", std::string{}));
        break;
      }
      default: break;
    }
  } catch (const Error&) {
    ++counters_.corrupt_inputs;
  } catch (const std::exception&) {
    ++counters_.corrupt_inputs;
  }
  return result;
}

void CopEngine::publish_locked(std::vector<Event>& events) {
  for (auto& e : events) {
    try {
      log_.append(std::move(e));
    } catch (const Error&) {
      halted_ = true;
      throw;
    }
  }
  events.clear();
}

geo::GeofenceBox CopEngine::add_geofence(const geo::GeofenceBox& fence) {
  std::unique_lock lock(mu_);
  geo::validate(fence);
  for (const auto& f : fences_)
    if (f.id == fence.id) throw Error(Errc::Conflict, "duplicate geofence id " + fence.id);
  InputRecord r;
  r.t = clock_;
  r.kind = InputKind::GeofenceAdd;
  r.payload = fence;
  apply_locked(std::move(r));
  return fence;
}

void CopEngine::delete_geofence(const std::string& id) {
  std::unique_lock lock(mu_);
  if (std::none_of(fences_.begin(), fences_.end(), [&](const geo::GeofenceBox& f) { return f.id == id; }))
    throw Error(Errc::UnknownFence, id);
  InputRecord r;
  r.t = clock_;
  r.kind = InputKind::GeofenceDelete;
  r.payload = {{"id", id}};
  apply_locked(std::move(r));
}

fusion::CueTask CopEngine::manual_cue(Mmsi mmsi, const std::string& reason) {
  std::unique_lock lock(mu_);
  if (!store_.snapshot(clock_).find(mmsi)) throw Error(Errc::UnknownMmsi, std::to_string(mmsi));
  if (!fusion_.can_manual_cue(mmsi))
    throw Error(Errc::Conflict, "track " + std::to_string(mmsi) + " already verified or cued");
  InputRecord r;
  r.t = clock_;
  r.kind = InputKind::Cue;
  r.payload = {{"mmsi", mmsi}, {"reason", reason}};
  auto result = apply_locked(std::move(r));
  if (!result.cue) throw Error(Errc::Conflict, "cue not created");
  return *result.cue;
}

void CopEngine::add_feature(const std::string& feature_id, const std::vector<double>& values,
                            const similarity::FeatureMetadata& metadata) {
  std::unique_lock lock(mu_);
  if (vectors_.dim() != 0 && values.size() != vectors_.dim())
    throw Error(Errc::DimensionMismatch, "expected dimension " + std::to_string(vectors_.dim()));
  (void)similarity::normalized(values);
  InputRecord r;
  r.t = clock_;
  r.kind = InputKind::Feature;
  r.payload = {{"feature_id", feature_id}, {"values", values}, {"metadata", metadata}};
  apply_locked(std::move(r));
}

double CopEngine::clock() const {
  std::shared_lock lock(mu_);
  return clock_;
}

bool CopEngine::halted() const {
  std::shared_lock lock(mu_);
  return halted_;
}

TrackSnapshot CopEngine::tracks() const {
  std::shared_lock lock(mu_);
  return store_.snapshot(clock_);
}

std::optional<Track> CopEngine::track(Mmsi mmsi) const {
  std::shared_lock lock(mu_);
  return store_.track(mmsi);
}

Prediction CopEngine::predict(Mmsi mmsi, double t) const {
  std::shared_lock lock(mu_);
  return store_.predict_position(mmsi, t);
}

std::vector<geo::GeofenceBox> CopEngine::geofences() const {
  std::shared_lock lock(mu_);
  return fences_;
}

std::vector<fmv::DetectionRecord> CopEngine::detections(double since_t, const std::string& class_label) const {
  std::shared_lock lock(mu_);
  return fmv_.detections(since_t, class_label);
}

std::vector<fusion::CueTask> CopEngine::cues() const {
  std::shared_lock lock(mu_);
  return fusion_.cues();
}

std::vector<fusion::CorrelationRecord> CopEngine::correlations() const {
  std::shared_lock lock(mu_);
  return {fusion_.correlations().begin(), fusion_.correlations().end()};
}

std::vector<analytics::CountSeries> CopEngine::counts(const std::string& class_label, double since_t) const {
  std::shared_lock lock(mu_);
  std::vector<analytics::CountSeries> out;
  for (const auto& label : analytics_.classes()) {
    if (!class_label.empty() && label != class_label) continue;
    auto s = *analytics_.series(label);
    const auto keep = [&](const auto& b) { return static_cast<double>(b.first + s.bucket_seconds) > since_t; };
    const auto first = std::find_if(s.buckets.begin(), s.buckets.end(), keep);
    const auto dropped = static_cast<std::size_t>(first - s.buckets.begin());
    s.buckets.erase(s.buckets.begin(), first);
    s.closed = s.closed > dropped ? s.closed - dropped : 0;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<similarity::SearchHit> CopEngine::search(const std::string& feature_id, std::size_t k) const {
  return vectors_.search_topk(feature_id, k);
}

std::vector<similarity::SearchHit> CopEngine::search(const std::vector<double>& values, std::size_t k) const {
  return vectors_.search_topk(values, k);
}

std::vector<similarity::ProjectedPoint> CopEngine::projection(std::optional<std::uint64_t> seed,
                                                              std::optional<int> k) const {
  auto cfg = config_.projection;
  if (seed) cfg.seed = *seed;
  if (k) cfg.k_neighbors = *k;
  cfg.validate();
  const auto rows = vectors_.copy_all();
  return similarity::project_2d(rows, cfg);
}

EngineCounters CopEngine::counters() const {
  std::shared_lock lock(mu_);
  return counters_;
}

ais::DecoderCounters CopEngine::decoder_counters() const {
  std::shared_lock lock(mu_);
  return decoder_.counters();
}

nlohmann::json CopEngine::status() const {
  std::shared_lock lock(mu_);
  const auto d = decoder_.counters();
  return {
      {"clock", clock_},
      {"halted", halted_},
      {"store_version", store_.version()},
      {"tracks", store_.size()},
      {"archived_tracks", store_.archived_count()},
      {"geofences", fences_.size()},
      {"last_seq", log_.last_seq()},
      {"vectors", vectors_.size()},
      {"frames", fmv_.frames_processed()},
      {"geolocation_failures", fmv_.geolocation_failures()},
      {"unknown_fence_skips", ais_events_.unknown_fence_skips()},
      {"inputs",
       {{"total", counters_.inputs},
        {"corrupt", counters_.corrupt_inputs},
        {"reports_without_position", counters_.reports_without_position},
        {"features", counters_.features},
        {"rejected_features", counters_.rejected_features},
        {"epochs", counters_.epochs},
        {"evicted_tracks", counters_.evicted_tracks}}},
      {"decoder",
       {{"lines", d.lines},
        {"checksum_failures", d.checksum_failures},
        {"malformed", d.malformed},
        {"invalid_armor", d.invalid_armor},
        {"unsupported_types", d.unsupported_types},
        {"truncated", d.truncated},
        {"fragment_timeouts", d.fragment_timeouts},
        {"position_reports", d.position_reports},
        {"static_reports", d.static_reports}}},
  };
}

std::vector<InputRecord> load_live_files(const std::filesystem::path& ais_path,
                                         const std::filesystem::path& fmv_path, double fallback_t,
                                         std::size_t* corrupt) {
  std::vector<InputRecord> out;
  std::size_t bad = 0;
  if (!ais_path.empty()) {
    std::ifstream in(ais_path);
    if (!in) throw Error(Errc::StorageFailure, "cannot read " + ais_path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      InputRecord r;
      r.kind = InputKind::Ais;
      std::string_view sentence;
      r.t = ais::split_tag_block(line, &sentence).value_or(fallback_t);
      r.line = std::move(line);
      out.push_back(std::move(r));
    }
  }
  if (!fmv_path.empty()) {
    std::ifstream in(fmv_path);
    if (!in) throw Error(Errc::StorageFailure, "cannot read " + fmv_path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        InputRecord r;
        r.kind = InputKind::Fmv;
        r.payload = nlohmann::json::parse(line);
        r.t = parse_frame_record(r.payload).frame.timestamp;
        out.push_back(std::move(r));
      } catch (const std::exception&) {
        ++bad;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const InputRecord& a, const InputRecord& b) { return a.t < b.t; });
  if (corrupt) *corrupt = bad;
  return out;
}

std::vector<InputRecord> load_feature_file(const std::filesystem::path& path, double t, std::size_t* corrupt) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::StorageFailure, "cannot read " + path.string());
  std::vector<InputRecord> out;
  std::size_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      InputRecord r;
      r.t = t;
      r.kind = InputKind::Feature;
      r.payload = nlohmann::json::parse(line);
      if (!r.payload.contains("feature_id") || !r.payload.contains("values")) throw std::runtime_error("fields");
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      ++bad;
    }
  }
  if (corrupt) *corrupt = bad;
  return out;
}

}  // namespace cop
