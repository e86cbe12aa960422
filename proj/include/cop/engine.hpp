#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cop/ais.hpp"
#include "cop/ais_events.hpp"
#include "cop/analytics.hpp"
#include "cop/config.hpp"
#include "cop/event_log.hpp"
#include "cop/fmv.hpp"
#include "cop/fusion.hpp"
#include "cop/shared_mutex.hpp"
#include "cop/similarity.hpp"
#include "cop/track_store.hpp"
#include "json.hpp"

namespace cop {

enum class InputKind { Ais, Fmv, Feature, Tick, GeofenceAdd, GeofenceDelete, Cue };
std::string_view to_string(InputKind kind);
std::optional<InputKind> parse_input_kind(std::string_view name);

/// One recorded input, stamped with its receipt time. AIS inputs carry the
/// raw sentence in `line`; every other kind carries a JSON payload.
struct InputRecord {
  double t = 0.0;
  InputKind kind = InputKind::Tick;
  std::string line;
  nlohmann::json payload;
};

nlohmann::json to_json(const InputRecord& r);
/// Throws Error(CorruptInputRecord).
InputRecord parse_input_record(std::string_view line);

/// A parsed FMV frame line: either {"frame": {...}, "detections": [...]} or
/// the frame fields at top level next to "detections". Detections may carry
/// an inline "feature_values" array. Throws Error(CorruptInputRecord).
struct FrameRecord {
  fmv::FrameMeta frame;
  std::vector<fmv::DetectionInput> detections;
  std::map<std::string, std::vector<double>> feature_values;  // keyed by detection_id
};
FrameRecord parse_frame_record(const nlohmann::json& j);

struct EngineCounters {
  std::uint64_t inputs = 0;
  std::uint64_t corrupt_inputs = 0;
  std::uint64_t reports_without_position = 0;
  std::uint64_t frames = 0;
  std::uint64_t features = 0;
  std::uint64_t rejected_features = 0;
  std::uint64_t epochs = 0;
  std::uint64_t evicted_tracks = 0;
};

/// Composes every module behind one serialized writer. Inputs are applied in
/// arrival order under a simulated clock that never goes backward; epoch
/// rules run at absolute multiples of the configured epoch. Readers take a
/// shared lock and see a consistent state between two inputs.
class CopEngine {
 public:
  struct Options {
    /// Directory for events.ndjson and inputs.ndjson; in-memory when absent.
    std::optional<std::filesystem::path> log_dir;
    bool record_inputs = true;
    WallClock wall_clock = system_wall_clock;
  };

  explicit CopEngine(CopConfig config);
  CopEngine(CopConfig config, Options options);
  ~CopEngine();
  CopEngine(const CopEngine&) = delete;
  CopEngine& operator=(const CopEngine&) = delete;

  /// Applies one input. Record-level problems are counted, not thrown. A log
  /// write failure throws Error(StorageFailure) and halts the engine.
  void process(InputRecord record);
  /// Runs every epoch boundary up to and including the current clock.
  void finish();
  /// Advances the clock without input (recorded as a tick).
  void tick(double t);

  /// Mutations from the API, applied as recorded inputs at the current clock.
  /// Throws InvalidGeofence, Conflict (duplicate id), UnknownFence,
  /// UnknownMmsi (cue) or Conflict (cue not allowed in this state).
  geo::GeofenceBox add_geofence(const geo::GeofenceBox& fence);
  void delete_geofence(const std::string& id);
  fusion::CueTask manual_cue(Mmsi mmsi, const std::string& reason);
  /// Adds one similarity vector; throws DimensionMismatch, ZeroVector, NonFiniteEntry.
  void add_feature(const std::string& feature_id, const std::vector<double>& values,
                   const similarity::FeatureMetadata& metadata);

  double clock() const;
  bool halted() const;
  TrackSnapshot tracks() const;
  std::optional<Track> track(Mmsi mmsi) const;
  Prediction predict(Mmsi mmsi, double t) const;
  std::vector<geo::GeofenceBox> geofences() const;
  std::vector<fmv::DetectionRecord> detections(double since_t, const std::string& class_label) const;
  std::vector<fusion::CueTask> cues() const;
  std::vector<fusion::CorrelationRecord> correlations() const;
  std::vector<analytics::CountSeries> counts(const std::string& class_label, double since_t) const;
  std::vector<similarity::SearchHit> search(const std::string& feature_id, std::size_t k) const;
  std::vector<similarity::SearchHit> search(const std::vector<double>& values, std::size_t k) const;
  std::vector<similarity::ProjectedPoint> projection(std::optional<std::uint64_t> seed,
                                                     std::optional<int> k) const;
  EngineCounters counters() const;
  ais::DecoderCounters decoder_counters() const;
  nlohmann::json status() const;

  EventLog& events() { return log_; }
  const EventLog& events() const { return log_; }
  const CopConfig& config() const { return config_; }

 private:
  struct ApplyResult {
    std::optional<fusion::CueTask> cue;
  };

  ApplyResult apply_locked(InputRecord record);
  void run_epochs_before_locked(double t, bool inclusive);
  void run_epoch_locked(double t);
  void apply_ais_locked(const InputRecord& r);
  void apply_fmv_locked(const InputRecord& r);
  void apply_feature_locked(const nlohmann::json& payload);
  ApplyResult apply_control_locked(const InputRecord& r);
  void publish_locked(std::vector<Event>& events);
  void record_input_locked(const InputRecord& r);

  CopConfig config_;
  Options options_;
  EventLog log_;
  std::FILE* inputs_ = nullptr;

  mutable SharedMutex mu_;
  TrackStore store_;
  ais::AisDecoder decoder_;
  AisEventEngine ais_events_;
  fmv::FmvProcessor fmv_;
  fusion::FusionEngine fusion_;
  analytics::CountAnalytics analytics_;
  similarity::VectorStore vectors_;
  std::vector<geo::GeofenceBox> fences_;

  double clock_ = 0.0;
  bool started_ = false;
  double next_epoch_ = 0.0;
  bool halted_ = false;
  EngineCounters counters_;
};

/// Reads the live input files: AIS lines stamped by their tag block time
/// (`fallback_t` when absent) and FMV lines stamped by frame timestamp,
/// merged in time order with AIS first on ties. Either path may be empty.
std::vector<InputRecord> load_live_files(const std::filesystem::path& ais_path,
                                         const std::filesystem::path& fmv_path,
                                         double fallback_t, std::size_t* corrupt = nullptr);

/// Reads vector ingestion records {feature_id, values, metadata}.
std::vector<InputRecord> load_feature_file(const std::filesystem::path& path, double t,
                                           std::size_t* corrupt = nullptr);

}  // namespace cop
