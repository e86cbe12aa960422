#pragma once

#include <atomic>
#include <filesystem>
#include <vector>

#include "cop/engine.hpp"

namespace cop {

struct ReplayStats {
  std::size_t records = 0;
  std::size_t corrupt = 0;
  double wall_seconds = 0.0;
};

/// Reads a recorded input log. Unparseable lines are skipped and counted.
/// Records come back stably sorted by receipt time.
std::vector<InputRecord> load_input_log(const std::filesystem::path& path, std::size_t* corrupt = nullptr);

/// Feeds `records` to `engine` in order, then runs the trailing epochs.
/// `speed` multiplies simulated time against wall time; 0 means as fast as
/// possible. Stops early when `cancel` becomes true.
ReplayStats replay_records(CopEngine& engine, const std::vector<InputRecord>& records, double speed,
                           const std::atomic<bool>* cancel = nullptr);

/// load_input_log + replay_records. Throws InvalidArgument for a negative
/// or non-finite speed.
ReplayStats replay_log(const std::filesystem::path& path, CopEngine& engine, double speed,
                       const std::atomic<bool>* cancel = nullptr);

}  // namespace cop
