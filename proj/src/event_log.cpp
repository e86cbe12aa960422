#include "cop/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include "cop/error.hpp"
#include "cop/json_io.hpp"

namespace cop {

void to_json(nlohmann::json& j, const EventLogRecord& r) {
  j = {{"seq", r.seq}, {"wrote_at", r.wrote_at}, {"event", r.event}};
}

void from_json(const nlohmann::json& j, EventLogRecord& r) {
  r.seq = j.at("seq").get<std::uint64_t>();
  r.wrote_at = j.at("wrote_at").get<double>();
  r.event = j.at("event").get<Event>();
}

double system_wall_clock() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

EventLog::EventLog(std::optional<std::filesystem::path> path, WallClock wall_clock)
    : path_(std::move(path)), wall_clock_(std::move(wall_clock)) {
  if (!path_) return;
  recover();
  file_ = std::fopen(path_->c_str(), "ab");
  if (!file_) throw Error(Errc::StorageFailure, "cannot open event log " + path_->string());
}

EventLog::~EventLog() {
  close();
  if (file_) std::fclose(file_);
}

void EventLog::recover() {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(*path_, ec)) return;
  std::ifstream in(*path_, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  std::size_t pos = 0;
  std::size_t good_bytes = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    const bool complete = nl != std::string::npos;
    const std::string line = data.substr(pos, complete ? nl - pos : std::string::npos);
    const std::size_t next = complete ? nl + 1 : data.size();
    EventLogRecord rec;
    bool ok = false;
    try {
      rec = nlohmann::json::parse(line).get<EventLogRecord>();
      ok = true;
    } catch (const std::exception&) {
    }
    const bool last = next >= data.size();
    if (!ok || !complete) {
      if (!last) throw Error(Errc::StorageFailure, "corrupt record in the middle of " + path_->string());
      truncated_tail_ = true;
      break;
    }
    if (rec.seq != records_.size() + 1)
      throw Error(Errc::StorageFailure, "sequence gap in " + path_->string());
    rec.event.id = rec.seq;
    records_.push_back(std::move(rec));
    good_bytes = next;
    pos = next;
  }
  if (truncated_tail_) std::filesystem::resize_file(*path_, good_bytes);
  recovered_ = records_.size();
}

EventLogRecord EventLog::append(Event event) {
  EventLogRecord rec;
  {
    std::unique_lock lock(mu_);
    rec.seq = records_.size() + 1;
    rec.wrote_at = wall_clock_();
    event.id = rec.seq;
    rec.event = std::move(event);
    if (file_) {
      const std::string line = nlohmann::json(rec).dump() + "\n";
      if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
        std::clearerr(file_);
        throw Error(Errc::StorageFailure, "event log write failed");
      }
    }
    if (after_write_) after_write_(rec);
    records_.push_back(rec);
  }
  {
    std::lock_guard lk(wait_mu_);
  }
  cv_.notify_all();
  return rec;
}

std::vector<EventLogRecord> EventLog::query(const EventQuery& q) const {
  std::shared_lock lock(mu_);
  std::vector<EventLogRecord> out;
  for (std::size_t i = q.since_seq; i < records_.size() && out.size() < q.limit; ++i) {
    const auto& r = records_[i];
    if (q.kind && r.event.kind != *q.kind) continue;
    if (q.since_t && r.event.timestamp < *q.since_t) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<EventLogRecord> EventLog::after(std::uint64_t seq, std::size_t limit) const {
  EventQuery q;
  q.since_seq = seq;
  q.limit = limit;
  return query(q);
}

bool EventLog::wait_after(std::uint64_t seq, std::chrono::milliseconds timeout) const {
  std::unique_lock lk(wait_mu_);
  cv_.wait_for(lk, timeout, [&] { return closed() || last_seq() > seq; });
  return last_seq() > seq;
}

void EventLog::close() {
  {
    std::unique_lock lock(mu_);
    closed_ = true;
  }
  {
    std::lock_guard lk(wait_mu_);
  }
  cv_.notify_all();
}

bool EventLog::closed() const {
  std::shared_lock lock(mu_);
  return closed_;
}

std::uint64_t EventLog::last_seq() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::size_t EventLog::size() const { return last_seq(); }

}  // namespace cop
