#include "cop/error.hpp"
#include "cop/simulator.hpp"

namespace cop::sim {

namespace {

constexpr double kStart = 1700000040.0;  // a whole minute

geo::GeoPoint offset_m(const geo::GeoPoint& p, double north, double east) {
  return {p.lat + north / geo::meters_per_deg_lat(), p.lon + east / geo::meters_per_deg_lon(p.lat)};
}

VesselSpec vessel(Mmsi mmsi, std::string name, geo::GeoPoint start, std::vector<Leg> legs) {
  VesselSpec v;
  v.mmsi = mmsi;
  v.name = std::move(name);
  v.callsign = "C" + std::to_string(mmsi % 100000);
  v.start = start;
  v.legs = std::move(legs);
  v.static_interval = 0.0;
  return v;
}

UavSpec hover(geo::GeoPoint center) {
  UavSpec u;
  u.orbit_center = center;
  u.radius_m = 0.0;
  u.period_s = 600.0;
  u.altitude_m = 1500.0;
  u.frame_interval = 10.0;
  return u;
}

Scenario transit() {
  Scenario s;
  s.name = "transit";
  s.start_time = kStart;
  s.duration = 3600;
  s.vessels.push_back(vessel(366000001, "TRANSIT ONE", {36.80, -76.10}, {{{36.80, -75.80}, 12.0}}));
  s.geofences.push_back({"harbor", 36.78, 36.82, -76.05, -76.00});
  return s;
}

Scenario projected_entry() {
  Scenario s;
  s.name = "projected_entry";
  s.start_time = kStart;
  s.duration = 3000;
  const geo::GeoPoint turn{36.835, -76.045};
  s.vessels.push_back(vessel(366000002, "NEAR MISS", {36.835, -76.14},
                             {{turn, 10.0}, {geo::destination(turn, 75.0, 8000.0), 10.0}}));
  s.geofences.push_back({"anchorage", 36.80, 36.84, -76.00, -75.96});
  return s;
}

Scenario off_course() {
  Scenario s;
  s.name = "off_course";
  s.start_time = kStart;
  s.duration = 2700;
  const geo::GeoPoint corner{36.70, -76.20};
  auto turner = vessel(366000003, "HARD TURN", {36.70, -76.30},
                       {{corner, 12.0}, {geo::destination(corner, 180.0, 8000.0), 12.0}});
  turner.report_offset = 4.0;
  s.vessels.push_back(turner);
  s.vessels.push_back(vessel(366000004, "STEADY", {36.60, -76.30}, {{{36.60, -76.10}, 8.0}}));
  return s;
}

Scenario rendezvous() {
  Scenario s;
  s.name = "rendezvous";
  s.start_time = kStart;
  s.duration = 1500;
  const geo::GeoPoint a0{36.65, -76.25};
  const auto a_end = geo::destination(a0, 90.0, 12000.0);
  const auto a_meet = geo::destination(a0, 90.0, 4000.0);
  const auto meet = geo::destination(a_meet, 0.0, 20.0);
  const auto b0 = geo::destination(a0, 0.0, 700.0);
  const double along = geo::initial_bearing(a_meet, a_end);
  s.vessels.push_back(vessel(366000005, "RDV ALPHA", a0, {{a_end, 10.0}}));
  s.vessels.push_back(vessel(366000006, "RDV BRAVO", b0, {{meet, 10.1}, {geo::destination(meet, along, 8000.0), 10.0}}));
  return s;
}

Scenario disappearance() {
  Scenario s;
  s.name = "disappearance";
  s.start_time = kStart;
  s.duration = 3600;
  auto v = vessel(366000007, "QUIET ONE", {36.75, -76.40}, {{{36.75, -76.00}, 9.0}});
  v.ais_silences.push_back({1200.0, 3000.0});
  s.vessels.push_back(v);
  return s;
}

Scenario dark() {
  Scenario s;
  s.name = "dark";
  s.start_time = kStart;
  s.duration = 900;
  s.seed = 7;
  s.detection_noise_sigma = 10.0;
  const geo::GeoPoint c{36.90, -76.10};
  s.uav = hover(c);
  s.vessels.push_back(vessel(366000008, "LIT", offset_m(c, -300, -500), {{offset_m(c, 600, -500), 1.0}}));
  auto d = vessel(366000009, "UNLIT", offset_m(c, -300, 500), {{offset_m(c, 600, 500), 1.0}});
  d.dark = true;
  s.vessels.push_back(d);
  return s;
}

Scenario tip_and_cue() {
  Scenario s;
  s.name = "tip_and_cue";
  s.start_time = kStart;
  s.duration = 900;
  s.seed = 11;
  s.detection_noise_sigma = 10.0;
  const geo::GeoPoint c{36.95, -76.20};
  s.uav = hover(c);
  s.vessels.push_back(vessel(366000010, "CUED", offset_m(c, 0, -2000), {{offset_m(c, 0, 3000), 6.0}}));
  s.geofences.push_back({"checkpoint", 36.946, 36.954, -76.205, -76.195});
  return s;
}

}  // namespace

std::vector<std::string> reference_scenario_names() {
  return {"transit", "projected_entry", "off_course", "rendezvous", "disappearance", "dark", "tip_and_cue"};
}

Scenario reference_scenario(const std::string& name) {
  if (name == "transit") return transit();
  if (name == "projected_entry") return projected_entry();
  if (name == "off_course") return off_course();
  if (name == "rendezvous") return rendezvous();
  if (name == "disappearance") return disappearance();
  if (name == "dark") return dark();
  if (name == "tip_and_cue") return tip_and_cue();
  throw Error(Errc::InvalidScenario, "unknown reference scenario " + name);
}

}  // namespace cop::sim
