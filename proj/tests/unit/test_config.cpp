#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cop/config.hpp"
#include "cop/error.hpp"

using namespace cop;
using nlohmann::json;

namespace {

Errc code_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted " << j.dump();
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Config, EmptyObjectGivesDefaults) {
  const auto c = config_from_json(json::object());
  EXPECT_EQ(c.events.t_gone, 900.0);
  EXPECT_EQ(c.events.theta_off, 1000.0);
  EXPECT_EQ(c.events.horizon_off, 600.0);
  EXPECT_EQ(c.events.d_coloc, 100.0);
  EXPECT_EQ(c.events.debounce_coloc, 2);
  EXPECT_EQ(c.events.epoch, 60.0);
  EXPECT_EQ(c.events.horizon_proj, 1800.0);
  EXPECT_EQ(c.fusion.gate_m, 200.0);
  EXPECT_EQ(c.fusion.dark_frames, 3);
  EXPECT_EQ(c.fusion.cue_window, 1200.0);
  EXPECT_EQ(c.anomaly.window, 30);
  EXPECT_EQ(c.anomaly.min_history, 10);
  EXPECT_EQ(c.anomaly.z_threshold, 3.0);
  EXPECT_EQ(c.projection.k_neighbors, 15);
  EXPECT_EQ(c.confidence_threshold, 0.5);
  EXPECT_EQ(c.bucket_seconds, 60);
  EXPECT_TRUE(c.geofences.empty());
}

TEST(Config, RoundTripsThroughJson) {
  auto j = json::parse(R"({
    "events": {"t_gone": 300, "epoch": 30, "debounce_coloc": 3},
    "fusion": {"gate_m": 150, "vessel_classes": ["boat"]},
    "anomaly": {"window": 20, "min_history": 5, "z_threshold": 2.5},
    "fmv": {"confidence_threshold": 0.6},
    "analytics": {"bucket_seconds": 300},
    "service": {"host": "0.0.0.0", "port": 9000},
    "geofences": [{"id": "harbor", "min_lat": 36.9, "max_lat": 37.0, "min_lon": -76.4, "max_lon": -76.3}]
  })");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.events.t_gone, 300.0);
  EXPECT_EQ(c.events.epoch, 30.0);
  EXPECT_EQ(c.events.debounce_coloc, 3);
  EXPECT_EQ(c.fusion.gate_m, 150.0);
  EXPECT_EQ(c.fusion.vessel_classes, std::set<std::string>{"boat"});
  EXPECT_EQ(c.anomaly.z_threshold, 2.5);
  EXPECT_EQ(c.confidence_threshold, 0.6);
  EXPECT_EQ(c.bucket_seconds, 300);
  EXPECT_EQ(c.port, 9000);
  ASSERT_EQ(c.geofences.size(), 1u);
  EXPECT_EQ(c.geofences[0].id, "harbor");

  const auto again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(code_of({{"bogus", 1}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"events", {{"t_gon", 1}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"events", {{"t_gone", -1}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"events", {{"t_gone", "soon"}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"fusion", {{"gate_m", 0}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"anomaly", {{"min_history", 40}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"fmv", {{"confidence_threshold", 1.5}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"service", {{"port", 70000}}}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of({{"events", 5}}), Errc::InvalidConfig);
  EXPECT_EQ(code_of(json::parse(R"({"geofences": [{"id": "a", "min_lat": 2, "max_lat": 1, "min_lon": 0, "max_lon": 1}]})")),
            Errc::InvalidConfig);
  EXPECT_EQ(code_of(json::parse(R"({"geofences": [
      {"id": "a", "min_lat": 0, "max_lat": 1, "min_lon": 0, "max_lon": 1},
      {"id": "a", "min_lat": 0, "max_lat": 1, "min_lon": 0, "max_lon": 1}]})")),
            Errc::InvalidConfig);
}

TEST(Config, LoadFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "cop_config_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json", bad = dir / "bad.json";
  std::ofstream(good) << R"({"events": {"epoch": 10}})";
  std::ofstream(bad) << "{not json";
  EXPECT_EQ(load_config(good).events.epoch, 10.0);
  EXPECT_THROW(load_config(bad), Error);
  EXPECT_THROW(load_config(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}
