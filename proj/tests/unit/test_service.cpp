#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include "cop/engine.hpp"
#include "cop/json_io.hpp"
#include "cop/service.hpp"
#include "cop/simulator.hpp"
#include "httplib.h"
#include "scenario_run.hpp"

using namespace cop;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

InputRecord ais_input(double t, Mmsi mmsi, geo::GeoPoint p, double sog = 10.0, double cog = 90.0) {
  InputRecord r;
  r.t = t;
  r.kind = InputKind::Ais;
  r.line = sim::to_sentences(sim::encode_position(sim::quantize(mmsi, t, p, sog, cog)), 0, 'A', t).front();
  return r;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("cop_service_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_ / "live");
    engine_ = std::make_unique<CopEngine>(config(), CopEngine::Options{root_ / "live", true, system_wall_clock});
    CopService::Options opts;
    opts.replay_root = root_ / "replays";
    opts.stream_keepalive_s = 0.2;
    service_ = std::make_unique<CopService>(*engine_, opts);
    port_ = service_->bind_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    server_ = std::thread([this] { service_->listen_after_bind(); });
    service_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(10, 0);
  }

  void TearDown() override {
    service_->stop();
    server_.join();
    service_.reset();
    engine_.reset();
    fs::remove_all(root_);
  }

  virtual CopConfig config() { return CopConfig{}; }

  static json body(const httplib::Result& r) { return json::parse(r->body); }

  json get_ok(const std::string& path) {
    auto r = client_->Get(path);
    EXPECT_TRUE(r);
    EXPECT_EQ(r->status, 200) << path << " " << r->body;
    return body(r);
  }

  std::string error_code(const httplib::Result& r) { return body(r)["error"]["code"].get<std::string>(); }

  // Three vessels, one second apart: three Appearance events.
  void seed_tracks() {
    engine_->process(ais_input(1000, 101, {10, 10}));
    engine_->process(ais_input(1001, 102, {10.1, 10}));
    engine_->process(ais_input(1002, 103, {10.2, 10}));
  }

  /// Reads SSE frames until `count` events arrived; returns their ids.
  std::vector<std::uint64_t> stream(const std::string& path, std::size_t count,
                                    const std::function<void()>& after_connect = {}) {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10, 0);
    std::vector<std::uint64_t> ids;
    std::string buffer;
    bool started = false;
    c.Get(path, [&](const char* data, std::size_t len) {
      if (!started && after_connect) after_connect();
      started = true;
      buffer.append(data, len);
      std::size_t end;
      while ((end = buffer.find("\n\n")) != std::string::npos) {
        const auto frame = buffer.substr(0, end);
        buffer.erase(0, end + 2);
        if (frame.rfind("id: ", 0) == 0) {
          ids.push_back(std::stoull(frame.substr(4, frame.find('\n') - 4)));
          const auto data_at = frame.find("data: ");
          const auto rec = json::parse(frame.substr(data_at + 6));
          EXPECT_EQ(rec["seq"].get<std::uint64_t>(), ids.back());
        }
      }
      return ids.size() < count;
    });
    return ids;
  }

  fs::path root_;
  std::unique_ptr<CopEngine> engine_;
  std::unique_ptr<CopService> service_;
  std::thread server_;
  int port_ = -1;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_F(ServiceTest, EmptyTracksIsAnEmptyList) {
  auto r = client_->Get("/tracks");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "[]");
  EXPECT_EQ(r->get_header_value("Content-Type"), "application/json");
}

TEST_F(ServiceTest, TracksAndPrediction) {
  seed_tracks();
  const auto tracks = get_ok("/tracks");
  ASSERT_EQ(tracks.size(), 3u);
  EXPECT_EQ(tracks[0]["mmsi"], 101);
  const auto t = get_ok("/tracks/102");
  EXPECT_EQ(t["mmsi"], 102);
  const auto p = get_ok("/tracks/101/prediction?t=1060");
  EXPECT_EQ(p["staleness"], 60.0);

  auto r = client_->Get("/tracks/999");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(error_code(r), "UnknownMmsi");
  r = client_->Get("/tracks/101/prediction?t=abc");
  EXPECT_EQ(r->status, 400);
  r = client_->Get("/tracks/101/prediction?t=10");
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(error_code(r), "NoReportBefore");
}

TEST_F(ServiceTest, GeofenceLifecycle) {
  auto r = client_->Post("/geofences", R"({"id":"bad","min_lat":2,"max_lat":1,"min_lon":0,"max_lon":1})",
                         "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(error_code(r), "InvalidGeofence");
  r = client_->Post("/geofences", R"({"id":"x"})", "application/json");
  EXPECT_EQ(r->status, 400);
  r = client_->Post("/geofences", "not json", "application/json");
  EXPECT_EQ(r->status, 400);

  const std::string box = R"({"id":"harbor","min_lat":36.9,"max_lat":37.0,"min_lon":-76.4,"max_lon":-76.3})";
  r = client_->Post("/geofences", box, "application/json");
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(body(r)["max_lon"], -76.3);
  EXPECT_EQ(client_->Post("/geofences", box, "application/json")->status, 409);
  EXPECT_EQ(get_ok("/geofences").size(), 1u);
  EXPECT_EQ(client_->Delete("/geofences/harbor")->status, 204);
  r = client_->Delete("/geofences/harbor");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(error_code(r), "UnknownFence");
  EXPECT_TRUE(get_ok("/geofences").empty());
}

TEST_F(ServiceTest, EventQueries) {
  seed_tracks();
  auto all = get_ok("/events");
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0]["seq"], 1);
  EXPECT_EQ(all[0]["event"]["kind"], "Appearance");
  EXPECT_EQ(get_ok("/events?since_seq=1").size(), 2u);
  EXPECT_EQ(get_ok("/events?since_seq=1&limit=1")[0]["seq"], 2);
  EXPECT_EQ(get_ok("/events?kind=Appearance&since_t=1001").size(), 2u);
  EXPECT_TRUE(get_ok("/events?kind=OffCourse").empty());
  auto r = client_->Get("/events?kind=Nope");
  EXPECT_EQ(r->status, 400);
  r = client_->Get("/events?since_seq=-1");
  EXPECT_EQ(r->status, 400);
}

TEST_F(ServiceTest, StreamResumesFromAnySeq) {
  seed_tracks();
  EXPECT_EQ(stream("/events/stream?since_seq=0", 3), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(stream("/events/stream?since_seq=2", 1), (std::vector<std::uint64_t>{3}));
  httplib::Headers h{{"Last-Event-ID", "1"}};
  std::vector<std::uint64_t> ids;
  httplib::Client c("127.0.0.1", port_);
  c.Get("/events/stream", h, [&](const char* data, std::size_t len) {
    const std::string chunk(data, len);
    for (std::size_t p = chunk.find("id: "); p != std::string::npos; p = chunk.find("id: ", p + 1))
      ids.push_back(std::stoull(chunk.substr(p + 4)));
    return ids.size() < 2;
  });
  EXPECT_EQ(ids, (std::vector<std::uint64_t>{2, 3}));
}

TEST_F(ServiceTest, StreamDeliversLiveEventsInOrder) {
  std::thread writer;
  const auto ids = stream("/events/stream", 20, [&] {
    writer = std::thread([this] {
      for (int i = 0; i < 20; ++i) engine_->process(ais_input(1000 + i, 200 + i, {0, 0.01 * i}));
    });
  });
  writer.join();
  ASSERT_EQ(ids.size(), 20u);
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], i + 1);
}

TEST_F(ServiceTest, Cues) {
  seed_tracks();
  auto r = client_->Post("/cues", R"({"mmsi": 999})", "application/json");
  EXPECT_EQ(r->status, 404);
  r = client_->Post("/cues", R"({"reason": "x"})", "application/json");
  EXPECT_EQ(r->status, 400);
  r = client_->Post("/cues", R"({"mmsi": 101, "reason": "look"})", "application/json");
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(body(r)["state"], "Pending");
  EXPECT_EQ(body(r)["subject_mmsi"], 101);
  r = client_->Post("/cues", R"({"mmsi": 101})", "application/json");
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(error_code(r), "Conflict");
  EXPECT_EQ(get_ok("/cues").size(), 1u);
  EXPECT_EQ(get_ok("/tracks/101")["verification_state"], "CuePending");
}

TEST_F(ServiceTest, SimilarityAndProjection) {
  auto r = client_->Post("/search/similar", R"({"k": 3})", "application/json");
  EXPECT_EQ(r->status, 400);
  r = client_->Post("/search/similar", R"({"feature_id": "nope"})", "application/json");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(client_->Get("/projection")->status, 422);

  engine_->add_feature("a", {1, 0, 0}, {"d1", "boat", 0});
  engine_->add_feature("b", {0.9, 0.1, 0}, {"d2", "boat", 0});
  engine_->add_feature("c", {0, 0, 1}, {"d3", "person", 0});
  r = client_->Post("/search/similar", R"({"feature_id": "a", "k": 1})", "application/json");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body(r)[0]["feature_id"], "b");
  r = client_->Post("/search/similar", R"({"values": [0, 0, 2], "k": 5})", "application/json");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body(r).size(), 3u);
  EXPECT_EQ(body(r)[0]["feature_id"], "c");
  r = client_->Post("/search/similar", R"({"values": [1, 0]})", "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(error_code(r), "DimensionMismatch");

  const auto p1 = get_ok("/projection?seed=4&k=2"), p2 = get_ok("/projection?seed=4&k=2");
  ASSERT_EQ(p1.size(), 3u);
  EXPECT_EQ(p1, p2);
  EXPECT_EQ(p1[2]["class_label"], "person");
  EXPECT_EQ(client_->Get("/projection?k=1")->status, 400);
}

TEST_F(ServiceTest, DetectionsAndCounts) {
  const auto scenario = sim::reference_scenario("dark");
  const auto out = sim::run_scenario(scenario);
  sim::write_outputs(out, scenario, root_ / "dark");
  for (auto& rec : load_live_files(root_ / "dark" / "ais.nmea", root_ / "dark" / "fmv.ndjson", 0))
    engine_->process(std::move(rec));
  const auto all = get_ok("/detections");
  EXPECT_FALSE(all.empty());
  EXPECT_TRUE(get_ok("/detections?class=person").empty());
  EXPECT_LT(get_ok("/detections?since_t=1700000100").size(), all.size());
  const auto counts = get_ok("/analytics/counts?class=boat");
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts[0]["class_label"], "boat");
  EXPECT_TRUE(get_ok("/analytics/counts?class=person").empty());
  EXPECT_EQ(client_->Get("/detections?since_t=soon")->status, 400);
}

TEST_F(ServiceTest, ReplaySessionMatchesLiveRun) {
  const auto scenario = sim::reference_scenario("transit");
  const auto out = sim::run_scenario(scenario);
  const auto live = scen::run_live(out, scenario, root_ / "transit");

  auto r = client_->Post("/replay", R"({"speed": 1})", "application/json");
  EXPECT_EQ(r->status, 400);
  r = client_->Post("/replay", json{{"path", (root_ / "missing").string()}}.dump(), "application/json");
  EXPECT_EQ(r->status, 400);
  r = client_->Post("/replay", json{{"path", (live.log_dir / "inputs.ndjson").string()}, {"speed", -2}}.dump(),
                    "application/json");
  EXPECT_EQ(r->status, 400);

  const auto request = json{{"path", (live.log_dir / "inputs.ndjson").string()}, {"speed", "max"}};
  r = client_->Post("/replay", request.dump(), "application/json");
  ASSERT_EQ(r->status, 202);
  const auto id = body(r)["session_id"].get<int>();
  json session;
  for (int i = 0; i < 200; ++i) {
    session = get_ok("/replay/" + std::to_string(id));
    if (session["done"] == true) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_EQ(session["done"], true);
  EXPECT_FALSE(session.contains("error"));
  EXPECT_GT(session["records"].get<int>(), 0);

  // Replay sessions use the service's config, here the defaults.
  const auto want = scen::payloads(scen::replay(live.log_dir / "inputs.ndjson", CopConfig{}));
  const auto got = get_ok("/replay/" + std::to_string(id) + "/events");
  std::vector<std::string> got_payloads;
  for (auto rec : got) {
    rec.erase("wrote_at");
    got_payloads.push_back(rec.dump());
  }
  EXPECT_EQ(got_payloads, want);
  EXPECT_EQ(client_->Get("/replay/99")->status, 404);
  EXPECT_EQ(get_ok("/status")["replays"].size(), 1u);
}

TEST_F(ServiceTest, StatusAndUnknownRoutes) {
  seed_tracks();
  const auto s = get_ok("/status");
  EXPECT_EQ(s["tracks"], 3);
  EXPECT_EQ(s["last_seq"], 3);
  EXPECT_EQ(s["halted"], false);
  auto r = client_->Get("/nowhere");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(error_code(r), "NotFound");
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(Errc::UnknownMmsi), 404);
  EXPECT_EQ(http_status(Errc::Conflict), 409);
  EXPECT_EQ(http_status(Errc::InvalidGeofence), 400);
  EXPECT_EQ(http_status(Errc::StorageFailure), 503);
}
