#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "cop/event.hpp"
#include "cop/shared_mutex.hpp"

namespace cop {

struct EventLogRecord {
  std::uint64_t seq = 0;
  double wrote_at = 0.0;  // wall clock; excluded from replay comparisons
  Event event;
};

void to_json(nlohmann::json& j, const EventLogRecord& r);
void from_json(const nlohmann::json& j, EventLogRecord& r);

struct EventQuery {
  std::optional<EventKind> kind;
  std::uint64_t since_seq = 0;  // exclusive
  std::optional<double> since_t;
  std::size_t limit = std::numeric_limits<std::size_t>::max();
};

using WallClock = std::function<double()>;
double system_wall_clock();

/// Append-only event log, optionally persisted as newline-delimited JSON.
/// Sequence numbers start at 1 and are gapless; event ids equal seq.
class EventLog {
 public:
  /// Opens (and recovers) `path` when given. A torn final line is truncated;
  /// any other corruption throws Error(StorageFailure).
  explicit EventLog(std::optional<std::filesystem::path> path = std::nullopt,
                    WallClock wall_clock = system_wall_clock);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  /// Durable append, then subscriber notification. Throws
  /// Error(StorageFailure) if the write fails; nothing is published then.
  EventLogRecord append(Event event);

  std::vector<EventLogRecord> query(const EventQuery& q) const;
  std::vector<EventLogRecord> after(std::uint64_t seq, std::size_t limit) const;

  /// Waits until a record newer than `seq` exists, the log is closed, or the
  /// timeout elapses. Returns true when newer records exist.
  bool wait_after(std::uint64_t seq, std::chrono::milliseconds timeout) const;
  /// Wakes all waiters; subsequent waits return immediately.
  void close();
  bool closed() const;

  std::uint64_t last_seq() const;
  std::size_t size() const;
  std::size_t recovered_records() const { return recovered_; }
  bool truncated_tail() const { return truncated_tail_; }
  const std::optional<std::filesystem::path>& path() const { return path_; }

  /// Called after the durable write and before notification.
  void set_after_write_hook(std::function<void(const EventLogRecord&)> hook) { after_write_ = std::move(hook); }

 private:
  void recover();

  std::optional<std::filesystem::path> path_;
  WallClock wall_clock_;
  std::FILE* file_ = nullptr;
  mutable SharedMutex mu_;
  mutable std::mutex wait_mu_;
  mutable std::condition_variable cv_;
  std::vector<EventLogRecord> records_;
  bool closed_ = false;
  std::size_t recovered_ = 0;
  bool truncated_tail_ = false;
  std::function<void(const EventLogRecord&)> after_write_;
};

}  // namespace cop
