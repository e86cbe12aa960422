#include "cop/analytics.hpp"

#include <cmath>

#include "cop/error.hpp"

namespace cop::analytics {

void AnomalyConfig::validate() const {
  if (window < 1 || min_history < 1 || min_history > window)
    throw Error(Errc::InvalidConfig, "AnomalyConfig requires 1 <= min_history <= window");
  if (!(z_threshold > 0)) throw Error(Errc::InvalidConfig, "z_threshold must be > 0");
}

std::optional<Event> detect_count_anomaly(const CountSeries& series, std::size_t index,
                                          const AnomalyConfig& config) {
  if (index >= series.buckets.size()) return std::nullopt;
  const std::size_t history = std::min<std::size_t>(index, static_cast<std::size_t>(config.window));
  if (history < static_cast<std::size_t>(config.min_history)) return std::nullopt;

  double sum = 0.0;
  for (std::size_t i = index - history; i < index; ++i) sum += static_cast<double>(series.buckets[i].second);
  const double mean = sum / static_cast<double>(history);
  double var = 0.0;
  for (std::size_t i = index - history; i < index; ++i) {
    const double d = static_cast<double>(series.buckets[i].second) - mean;
    var += d * d;
  }
  const double sigma = std::sqrt(var / static_cast<double>(history));
  const double x = static_cast<double>(series.buckets[index].second);

  bool anomalous = false;
  double z = 0.0;
  if (sigma > 0) {
    z = (x - mean) / sigma;
    anomalous = std::abs(z) > config.z_threshold;
  } else {
    anomalous = x != mean;
  }
  if (!anomalous) return std::nullopt;

  const auto start = series.buckets[index].first;
  nlohmann::json details{{"class_label", series.class_label},
                         {"bucket_start", start},
                         {"bucket_seconds", series.bucket_seconds},
                         {"count", series.buckets[index].second},
                         {"mean", mean},
                         {"stdev", sigma},
                         {"history", history}};
  details["z"] = sigma > 0 ? nlohmann::json(z) : nlohmann::json(nullptr);
  return make_event(EventKind::CountAnomaly, EventSource::ANALYTICS,
                    static_cast<double>(start + series.bucket_seconds), std::nullopt, {}, details);
}

CountAnalytics::CountAnalytics(std::int64_t bucket_seconds, AnomalyConfig config,
                               double confidence_threshold, std::size_t retain_buckets)
    : bucket_seconds_(bucket_seconds),
      config_(config),
      confidence_threshold_(confidence_threshold),
      retain_buckets_(retain_buckets) {
  if (bucket_seconds_ < 1) throw Error(Errc::InvalidConfig, "bucket_seconds must be >= 1");
  config_.validate();
  if (retain_buckets_ < static_cast<std::size_t>(config_.window) + 1) retain_buckets_ = config_.window + 1;
}

std::int64_t CountAnalytics::bucket_of(double t) const {
  return static_cast<std::int64_t>(std::floor(t / static_cast<double>(bucket_seconds_))) * bucket_seconds_;
}

std::vector<Event> CountAnalytics::advance_to(double t) {
  const auto target = bucket_of(t);
  std::vector<Event> events;
  for (auto& [label, s] : series_) {
    while (!s.buckets.empty() && s.buckets.back().first < target) {
      const std::size_t closing = s.buckets.size() - 1;
      s.closed = closing + 1;
      if (auto e = detect_count_anomaly(s, closing, config_)) events.push_back(std::move(*e));
      s.buckets.emplace_back(s.buckets.back().first + bucket_seconds_, 0);
      if (s.buckets.size() > retain_buckets_) {
        s.buckets.erase(s.buckets.begin());
        --s.closed;
      }
    }
  }
  return events;
}

std::vector<Event> CountAnalytics::observe(double t, std::span<const fmv::DetectionRecord> detections) {
  auto events = advance_to(t);
  const auto bucket = bucket_of(t);
  for (const auto& d : detections) {
    if (d.confidence < confidence_threshold_) continue;
    auto [it, inserted] = series_.try_emplace(d.class_label);
    auto& s = it->second;
    if (inserted) {
      s.class_label = d.class_label;
      s.bucket_seconds = bucket_seconds_;
      s.buckets.emplace_back(bucket, 0);
    }
    // Late frames count into their own bucket if still retained.
    for (auto b = s.buckets.rbegin(); b != s.buckets.rend(); ++b)
      if (b->first == bucket) {
        ++b->second;
        ++totals_[d.class_label];
        break;
      }
  }
  return events;
}

const CountSeries* CountAnalytics::series(const std::string& class_label) const {
  auto it = series_.find(class_label);
  return it == series_.end() ? nullptr : &it->second;
}

std::vector<std::string> CountAnalytics::classes() const {
  std::vector<std::string> out;
  for (const auto& [label, _] : series_) out.push_back(label);
  return out;
}

std::int64_t CountAnalytics::total(const std::string& class_label) const {
  auto it = totals_.find(class_label);
  return it == totals_.end() ? 0 : it->second;
}

}  // namespace cop::analytics
