#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cop/event.hpp"
#include "cop/fmv.hpp"

namespace cop::analytics {

struct AnomalyConfig {
  int window = 30;
  int min_history = 10;
  double z_threshold = 3.0;

  void validate() const;
};

/// Per-class detection counts in fixed buckets. Bucket starts are multiples
/// of bucket_seconds; gaps are materialized as zero.
struct CountSeries {
  std::string class_label;
  std::int64_t bucket_seconds = 60;
  std::vector<std::pair<std::int64_t, std::int64_t>> buckets;  // (start, count)
  /// Buckets before this index are closed.
  std::size_t closed = 0;
};

/// Z-score test of bucket `index` against the `window` closed buckets before
/// it (population sigma). nullopt when below min_history or not anomalous.
std::optional<Event> detect_count_anomaly(const CountSeries& series, std::size_t index,
                                          const AnomalyConfig& config);

class CountAnalytics {
 public:
  explicit CountAnalytics(std::int64_t bucket_seconds = 60, AnomalyConfig config = {},
                          double confidence_threshold = 0.5, std::size_t retain_buckets = 10080);

  /// Advances every series to the bucket containing `t` (closing and testing
  /// the buckets left behind), then counts the frame's detections.
  std::vector<Event> observe(double t, std::span<const fmv::DetectionRecord> detections);
  /// Advances without counting.
  std::vector<Event> advance_to(double t);

  const CountSeries* series(const std::string& class_label) const;
  std::vector<std::string> classes() const;
  std::int64_t total(const std::string& class_label) const;

 private:
  std::int64_t bucket_of(double t) const;

  std::int64_t bucket_seconds_;
  AnomalyConfig config_;
  double confidence_threshold_;
  std::size_t retain_buckets_;
  std::map<std::string, CountSeries> series_;
  std::map<std::string, std::int64_t> totals_;
};

}  // namespace cop::analytics
