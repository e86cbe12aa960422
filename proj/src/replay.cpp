#include "cop/replay.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "cop/error.hpp"

namespace cop {

std::vector<InputRecord> load_input_log(const std::filesystem::path& path, std::size_t* corrupt) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::StorageFailure, "cannot read " + path.string());
  std::vector<InputRecord> out;
  std::size_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(parse_input_record(line));
    } catch (const Error&) {
      ++bad;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const InputRecord& a, const InputRecord& b) { return a.t < b.t; });
  if (corrupt) *corrupt = bad;
  return out;
}

ReplayStats replay_records(CopEngine& engine, const std::vector<InputRecord>& records, double speed,
                           const std::atomic<bool>* cancel) {
  if (!std::isfinite(speed) || speed < 0) throw Error(Errc::InvalidArgument, "speed must be >= 0");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  ReplayStats stats;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (cancel && cancel->load()) break;
    if (speed > 0 && i > 0) {
      const double dt = (records[i].t - records[0].t) / speed;
      std::this_thread::sleep_until(start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(dt)));
    }
    engine.process(records[i]);
    ++stats.records;
  }
  engine.finish();
  stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return stats;
}

ReplayStats replay_log(const std::filesystem::path& path, CopEngine& engine, double speed,
                       const std::atomic<bool>* cancel) {
  std::size_t corrupt = 0;
  const auto records = load_input_log(path, &corrupt);
  auto stats = replay_records(engine, records, speed, cancel);
  stats.corrupt = corrupt;
  return stats;
}

}  // namespace cop
