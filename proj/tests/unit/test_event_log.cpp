#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "cop/error.hpp"
#include "cop/event_log.hpp"

using namespace cop;
namespace fs = std::filesystem;

namespace {

Event ev(EventKind kind, double t, std::string subject = "1") {
  return make_event(kind, EventSource::AIS, t, geo::GeoPoint{1, 2}, {std::move(subject)});
}

double fixed_clock() { return 42.0; }

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("cop_log_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                  ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(EventLog, SequenceIsGaplessAndIdsMatch) {
  EventLog log(std::nullopt, fixed_clock);
  for (int i = 0; i < 20; ++i) {
    const auto r = log.append(ev(EventKind::Appearance, i));
    EXPECT_EQ(r.seq, static_cast<std::uint64_t>(i + 1));
    EXPECT_EQ(r.event.id, r.seq);
    EXPECT_EQ(r.wrote_at, 42.0);
  }
  EXPECT_EQ(log.last_seq(), 20u);
  EXPECT_EQ(log.size(), 20u);
}

TEST(EventLog, QueryFilters) {
  EventLog log(std::nullopt, fixed_clock);
  log.append(ev(EventKind::Appearance, 0));
  log.append(ev(EventKind::OffCourse, 60));
  log.append(ev(EventKind::Appearance, 120));
  log.append(ev(EventKind::Disappearance, 180));

  EventQuery q;
  q.kind = EventKind::Appearance;
  auto r = log.query(q);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].seq, 3u);

  q = {};
  q.since_seq = 2;
  r = log.query(q);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].seq, 3u);

  q = {};
  q.since_t = 100;
  EXPECT_EQ(log.query(q).size(), 2u);

  q = {};
  q.limit = 1;
  q.since_seq = 1;
  r = log.query(q);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].seq, 2u);
  EXPECT_TRUE(log.after(4, 10).empty());
}

TEST(EventLog, PersistsAndRecovers) {
  TempDir dir;
  const auto path = dir.path() / "events.ndjson";
  {
    EventLog log(path, fixed_clock);
    log.append(ev(EventKind::Appearance, 0, "7"));
    log.append(ev(EventKind::GeofenceEnter, 60, "7"));
  }
  EventLog log(path, fixed_clock);
  EXPECT_EQ(log.recovered_records(), 2u);
  EXPECT_FALSE(log.truncated_tail());
  const auto r = log.append(ev(EventKind::GeofenceExit, 120, "7"));
  EXPECT_EQ(r.seq, 3u);
  const auto all = log.query({});
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[1].event.kind, EventKind::GeofenceEnter);
  EXPECT_EQ(all[1].event.subjects, std::vector<std::string>{"7"});
  ASSERT_TRUE(all[1].event.location);
  EXPECT_EQ(all[1].event.location->lat, 1.0);
}

TEST(EventLog, TornTailIsTruncated) {
  TempDir dir;
  const auto path = dir.path() / "events.ndjson";
  {
    EventLog log(path, fixed_clock);
    log.append(ev(EventKind::Appearance, 0));
    log.append(ev(EventKind::Appearance, 1));
  }
  const auto intact = read_all(path);
  std::ofstream(path, std::ios::app) << R"({"seq":3,"wrote_at":1,"event":{"ki)";
  {
    EventLog log(path, fixed_clock);
    EXPECT_TRUE(log.truncated_tail());
    EXPECT_EQ(log.recovered_records(), 2u);
    EXPECT_EQ(read_all(path), intact);
    EXPECT_EQ(log.append(ev(EventKind::Appearance, 2)).seq, 3u);
  }
  EventLog log(path, fixed_clock);
  EXPECT_EQ(log.recovered_records(), 3u);
  EXPECT_FALSE(log.truncated_tail());
}

TEST(EventLog, MidFileCorruptionThrows) {
  TempDir dir;
  const auto path = dir.path() / "events.ndjson";
  {
    EventLog log(path, fixed_clock);
    log.append(ev(EventKind::Appearance, 0));
  }
  auto text = read_all(path);
  std::ofstream(path, std::ios::trunc) << "garbage\n" << text;
  try {
    EventLog log(path, fixed_clock);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StorageFailure);
  }
}

TEST(EventLog, SequenceGapThrows) {
  TempDir dir;
  const auto path = dir.path() / "events.ndjson";
  {
    EventLog log(path, fixed_clock);
    log.append(ev(EventKind::Appearance, 0));
    log.append(ev(EventKind::Appearance, 1));
  }
  auto text = read_all(path);
  text.erase(0, text.find('\n') + 1);
  std::ofstream(path, std::ios::trunc) << text;
  EXPECT_THROW(EventLog(path, fixed_clock), Error);
}

TEST(EventLog, WriteFailureIsStorageFailureAndNotPublished) {
  if (!fs::exists("/dev/full")) GTEST_SKIP() << "/dev/full unavailable";
  EventLog log(fs::path("/dev/full"), fixed_clock);
  try {
    log.append(ev(EventKind::Appearance, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StorageFailure);
  }
  EXPECT_EQ(log.size(), 0u);
  EXPECT_EQ(log.last_seq(), 0u);
}

TEST(EventLog, HookSeesEveryDurableRecord) {
  EventLog log(std::nullopt, fixed_clock);
  std::vector<std::uint64_t> seen;
  log.set_after_write_hook([&](const EventLogRecord& r) { seen.push_back(r.seq); });
  log.append(ev(EventKind::Appearance, 0));
  log.append(ev(EventKind::Appearance, 1));
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{1, 2}));
}

TEST(EventLog, WaitersWakeOnAppendAndClose) {
  EventLog log(std::nullopt, fixed_clock);
  EXPECT_FALSE(log.wait_after(0, std::chrono::milliseconds(10)));
  std::thread writer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    log.append(ev(EventKind::Appearance, 0));
  });
  EXPECT_TRUE(log.wait_after(0, std::chrono::seconds(5)));
  writer.join();

  std::thread closer([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    log.close();
  });
  const auto start = std::chrono::steady_clock::now();
  EXPECT_FALSE(log.wait_after(1, std::chrono::seconds(5)));
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(4));
  closer.join();
  EXPECT_TRUE(log.closed());
}

TEST(EventLog, RecordJsonRoundTrip) {
  EventLogRecord r;
  r.seq = 5;
  r.wrote_at = 1.5;
  r.event = make_event(EventKind::CountAnomaly, EventSource::ANALYTICS, 600, std::nullopt, {}, {{"z", 4.2}});
  r.event.id = 5;
  const nlohmann::json j = r;
  const auto back = j.get<EventLogRecord>();
  EXPECT_EQ(back.seq, 5u);
  EXPECT_EQ(back.event.kind, EventKind::CountAnomaly);
  EXPECT_FALSE(back.event.location);
  EXPECT_EQ(back.event.details["z"], 4.2);
  EXPECT_EQ(nlohmann::json(back), j);
}
