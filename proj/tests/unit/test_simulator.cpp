#include <gtest/gtest.h>

#include <cmath>

#include "cop/ais.hpp"
#include "cop/error.hpp"
#include "cop/geo.hpp"
#include "cop/simulator.hpp"

using namespace cop;
using nlohmann::json;

namespace {

sim::Scenario one_vessel() {
  sim::Scenario s;
  s.name = "one";
  s.seed = 3;
  s.duration = 3600;
  sim::VesselSpec v;
  v.mmsi = 366000001;
  v.start = {37.0, -76.0};
  v.legs = {{geo::destination(v.start, 90, 20000), 10}};
  v.report_interval = 60;
  s.vessels.push_back(v);
  return s;
}

sim::Scenario watched(bool dark, double sigma) {
  auto s = one_vessel();
  s.vessels[0].dark = dark;
  s.vessels[0].legs = {{geo::destination(s.vessels[0].start, 90, 600), 1}};
  s.detection_noise_sigma = sigma;
  sim::UavSpec uav;
  uav.orbit_center = s.vessels[0].start;
  uav.altitude_m = 1500;
  uav.frame_interval = 10;
  s.uav = uav;
  return s;
}

std::size_t count_kind(const std::vector<sim::ExpectedEvent>& events, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.kind == kind;
  return n;
}

}  // namespace

TEST(Simulator, OneSentencePerReportInterval) {
  const auto out = sim::run_scenario(one_vessel());
  EXPECT_EQ(out.ais_lines.size(), 61u);
  EXPECT_EQ(out.truth["position_reports"], 61);
  EXPECT_TRUE(out.fmv_lines.empty());

  ais::AisDecoder dec;
  double last_t = -1;
  for (const auto& line : out.ais_lines) {
    std::string_view body;
    const auto t = ais::split_tag_block(line, &body);
    ASSERT_TRUE(t) << line;
    EXPECT_GT(*t, last_t);
    last_t = *t;
    const auto m = dec.decode_line(line, *t);
    ASSERT_TRUE(m) << line;
    const auto* p = std::get_if<ais::AisPositionReport>(&*m);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->mmsi, 366000001u);
  }
}

TEST(Simulator, DarkVesselIsSeenOnlyByCamera) {
  const auto out = sim::run_scenario(watched(true, 0));
  EXPECT_TRUE(out.ais_lines.empty());
  EXPECT_GE(out.truth["detections"].size(), 1u);
  EXPECT_EQ(out.truth["dark_mmsis"], json::array({366000001}));
  EXPECT_EQ(count_kind(out.expected_events, "DarkVessel"), 1u);
}

TEST(Simulator, SameSeedIsByteIdentical) {
  const auto s = watched(false, 10);
  const auto a = sim::run_scenario(s), b = sim::run_scenario(s);
  EXPECT_EQ(a.ais_lines, b.ais_lines);
  EXPECT_EQ(a.fmv_lines, b.fmv_lines);
  EXPECT_EQ(a.truth.dump(), b.truth.dump());

  auto other = s;
  other.seed = 4;
  EXPECT_NE(sim::run_scenario(other).fmv_lines, a.fmv_lines);
}

TEST(Simulator, DetectionNoiseMatchesSigma) {
  const double sigma = 10;
  const auto out = sim::run_scenario(watched(false, sigma));
  const auto& dets = out.truth["detections"];
  ASSERT_GE(dets.size(), 300u);
  std::size_t inside = 0;
  double sum_sq = 0;
  for (const auto& [id, d] : dets.items()) {
    const geo::GeoPoint t{d["true"]["lat"], d["true"]["lon"]};
    const geo::GeoPoint o{d["observed"]["lat"], d["observed"]["lon"]};
    const double err = geo::haversine_distance(t, o);
    inside += err <= 3 * sigma;
    sum_sq += err * err;
  }
  EXPECT_GE(static_cast<double>(inside) / dets.size(), 0.99);
  EXPECT_NEAR(std::sqrt(sum_sq / dets.size()), sigma, 0.15 * sigma);
}

TEST(Simulator, InvalidScenarios) {
  const auto code = [](const sim::Scenario& s) {
    try {
      sim::run_scenario(s);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  auto s = one_vessel();
  s.duration = 0;
  EXPECT_EQ(code(s), Errc::InvalidScenario);
  s = one_vessel();
  s.vessels.push_back(s.vessels[0]);
  EXPECT_EQ(code(s), Errc::InvalidScenario);
  s = one_vessel();
  s.vessels[0].legs[0].speed_kn = 0;
  EXPECT_EQ(code(s), Errc::InvalidScenario);
  s = one_vessel();
  s.vessels[0].report_interval = -1;
  EXPECT_EQ(code(s), Errc::InvalidScenario);

  EXPECT_THROW(sim::reference_scenario("nope"), Error);
  EXPECT_THROW(sim::scenario_from_json(json{{"name", "x"}, {"unknown", 1}}), Error);
}

TEST(Simulator, ScenarioJsonRoundTrip) {
  for (const auto& name : sim::reference_scenario_names()) {
    const auto s = sim::reference_scenario(name);
    const auto j = sim::scenario_to_json(s);
    EXPECT_EQ(sim::scenario_to_json(sim::scenario_from_json(j)), j) << name;
  }
}

TEST(Simulator, ReferenceTruth) {
  const auto transit = sim::run_scenario(sim::reference_scenario("transit"));
  EXPECT_EQ(count_kind(transit.expected_events, "GeofenceEnter"), 1u);
  EXPECT_EQ(count_kind(transit.expected_events, "GeofenceExit"), 1u);

  const auto rdv = sim::run_scenario(sim::reference_scenario("rendezvous"));
  EXPECT_EQ(count_kind(rdv.expected_events, "Colocation"), 1u);

  const auto dark = sim::run_scenario(sim::reference_scenario("dark"));
  EXPECT_EQ(count_kind(dark.expected_events, "DarkVessel"), 1u);
  EXPECT_FALSE(dark.truth["dark_mmsis"].empty());

  for (const auto& name : sim::reference_scenario_names()) {
    const auto out = sim::run_scenario(sim::reference_scenario(name));
    EXPECT_FALSE(out.expected_events.empty()) << name;
    for (std::size_t i = 1; i < out.expected_events.size(); ++i)
      EXPECT_LE(out.expected_events[i - 1].t, out.expected_events[i].t) << name;
  }
}

TEST(Simulator, TrajectoryFollowsLegs) {
  auto v = one_vessel().vessels[0];
  const sim::Trajectory path(v);
  const double leg_s = 20000 / (10 * geo::kKnotToMps);
  EXPECT_NEAR(path.end_time(), leg_s, 1e-6);
  const auto mid = path.at(leg_s / 2);
  EXPECT_NEAR(geo::haversine_distance(v.start, mid.position), 10000, 1e-3);
  EXPECT_NEAR(mid.sog_kn, 10, 1e-12);
  const auto stopped = path.at(leg_s + 100);
  EXPECT_EQ(stopped.sog_kn, 0);
  EXPECT_NEAR(geo::haversine_distance(stopped.position, v.legs[0].to), 0, 1e-3);
}
