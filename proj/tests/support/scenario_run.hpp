#pragma once

// Runs simulator output through a full engine the way copd does, and compares
// the produced event log with the simulator's expected events.

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cop/engine.hpp"
#include "cop/replay.hpp"
#include "cop/simulator.hpp"

namespace scen {

namespace fs = std::filesystem;

struct LiveRun {
  std::vector<cop::EventLogRecord> events;
  cop::EngineCounters counters;
  fs::path log_dir;
};

/// Writes the scenario files under `dir`, then feeds them to an engine that
/// logs into `dir/log`.
inline LiveRun run_live(const cop::sim::SimOutput& out, const cop::sim::Scenario& scenario, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir / "log");
  cop::sim::write_outputs(out, scenario, dir);
  cop::CopEngine::Options opts;
  opts.log_dir = dir / "log";
  cop::CopEngine engine(out.config, opts);
  for (auto& r : cop::load_live_files(dir / "ais.nmea", dir / "fmv.ndjson", 0.0)) engine.process(std::move(r));
  engine.finish();
  return {engine.events().query({}), engine.counters(), dir / "log"};
}

/// Replays a recorded input log into a fresh in-memory engine.
inline std::vector<cop::EventLogRecord> replay(const fs::path& inputs, const cop::CopConfig& config) {
  cop::CopEngine::Options opts;
  opts.record_inputs = false;
  cop::CopEngine engine(config, opts);
  cop::replay_log(inputs, engine, 0.0);
  return engine.events().query({});
}

/// Event payloads with the wall-clock field dropped, one JSON line each.
inline std::vector<std::string> payloads(const std::vector<cop::EventLogRecord>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) {
    nlohmann::json j = r;
    j.erase("wrote_at");
    out.push_back(j.dump());
  }
  return out;
}

/// Empty when the log equals the expectation in kind, subjects, time and
/// order; otherwise a readable diff.
inline std::string diff_expected(const std::vector<cop::EventLogRecord>& got,
                                 const std::vector<cop::sim::ExpectedEvent>& want) {
  std::ostringstream os;
  const std::size_t n = std::max(got.size(), want.size());
  bool same = got.size() == want.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string g = "-", w = "-";
    if (i < got.size()) {
      const auto& e = got[i].event;
      g = std::string(cop::to_string(e.kind)) + nlohmann::json(e.subjects).dump() + "@" + std::to_string(e.timestamp);
    }
    if (i < want.size())
      w = want[i].kind + nlohmann::json(want[i].subjects).dump() + "@" + std::to_string(want[i].t);
    if (g != w) same = false;
    os << "  got " << g << "  want " << w << "\n";
  }
  return same ? std::string{} : os.str();
}

}  // namespace scen
