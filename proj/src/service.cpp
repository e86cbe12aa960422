#include "cop/service.hpp"

#include <atomic>
#include <charconv>
#include <list>
#include <mutex>
#include <thread>

#include "cop/error.hpp"
#include "cop/json_io.hpp"
#include "cop/replay.hpp"
#include "httplib.h"

namespace cop {

int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownMmsi:
    case Errc::UnknownFence:
    case Errc::UnknownFeatureId: return 404;
    case Errc::Conflict: return 409;
    case Errc::NoReportBefore:
    case Errc::TooFewPoints: return 422;
    case Errc::StorageFailure: return 503;
    default: return 400;
  }
}

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, {{"error", {{"code", code}, {"message", message}}}}, status);
}

double query_double(const httplib::Request& req, const std::string& key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const auto v = req.get_param_value(key);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw Error(Errc::InvalidArgument, "query parameter " + key + " is not a number");
  return out;
}

std::uint64_t query_uint(const httplib::Request& req, const std::string& key, std::uint64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto v = req.get_param_value(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error(Errc::InvalidArgument, "query parameter " + key + " is not a non-negative integer");
  return out;
}

Mmsi path_mmsi(const httplib::Request& req) {
  const auto v = req.matches[1].str();
  Mmsi out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw Error(Errc::InvalidArgument, "bad mmsi " + v);
  return out;
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

std::string sse_frame(const EventLogRecord& r) {
  return "id: " + std::to_string(r.seq) + "\nevent: " + std::string(to_string(r.event.kind)) +
         "\ndata: " + json(r).dump() + "\n\n";
}

}  // namespace

struct CopService::Impl {
  struct ReplaySession {
    std::uint64_t id = 0;
    std::filesystem::path source;
    double speed = 0.0;
    std::filesystem::path log_dir;
    std::unique_ptr<CopEngine> engine;
    std::thread worker;
    std::atomic<bool> done{false};
    ReplayStats stats;
    std::string error;
  };

  CopEngine& engine;
  Options options;
  httplib::Server server;
  std::atomic<bool> stopping{false};
  std::mutex replay_mu;
  std::list<ReplaySession> replays;
  std::atomic<bool> cancel_replays{false};

  Impl(CopEngine& e, Options o) : engine(e), options(std::move(o)) { routes(); }

  ~Impl() { shutdown(); }

  void shutdown() {
    stopping = true;
    cancel_replays = true;
    engine.events().close();
    server.stop();
    std::lock_guard lock(replay_mu);
    for (auto& s : replays) {
      if (s.engine) s.engine->events().close();
      if (s.worker.joinable()) s.worker.join();
    }
  }

  json replay_json(const ReplaySession& s) {
    json j{{"session_id", s.id},
           {"source", s.source.string()},
           {"speed", s.speed},
           {"log_dir", s.log_dir.string()},
           {"done", s.done.load()}};
    if (s.done) {
      j["records"] = s.stats.records;
      j["corrupt"] = s.stats.corrupt;
      j["wall_seconds"] = s.stats.wall_seconds;
      j["last_seq"] = s.engine ? s.engine->events().last_seq() : 0;
      if (!s.error.empty()) j["error"] = s.error;
    }
    return j;
  }

  void routes() {
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), errc_name(e.code()), e.message());
      } catch (const json::exception& e) {
        send_error(res, 400, "InvalidArgument", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    });

    server.Get("/tracks", [this](const httplib::Request&, httplib::Response& res) {
      const auto snap = engine.tracks();
      res.set_header("X-Snapshot-Version", std::to_string(snap.version));
      res.set_header("X-Snapshot-Time", json(snap.as_of).dump());
      send_json(res, snap.entries);
    });

    server.Get(R"(/tracks/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto mmsi = path_mmsi(req);
      const auto track = engine.track(mmsi);
      if (!track) throw Error(Errc::UnknownMmsi, std::to_string(mmsi));
      send_json(res, *track);
    });

    server.Get(R"(/tracks/(\d+)/prediction)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto mmsi = path_mmsi(req);
      const double t = query_double(req, "t", engine.clock());
      send_json(res, engine.predict(mmsi, t));
    });

    server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
      EventQuery q;
      if (req.has_param("kind")) {
        q.kind = parse_event_kind(req.get_param_value("kind"));
        if (!q.kind) throw Error(Errc::InvalidArgument, "unknown event kind " + req.get_param_value("kind"));
      }
      q.since_seq = query_uint(req, "since_seq", 0);
      if (req.has_param("since_t")) q.since_t = query_double(req, "since_t", 0);
      if (req.has_param("limit")) q.limit = query_uint(req, "limit", 0);
      send_json(res, engine.events().query(q));
    });

    server.Get("/events/stream", [this](const httplib::Request& req, httplib::Response& res) {
      std::uint64_t start = query_uint(req, "since_seq", 0);
      if (!req.has_param("since_seq") && req.has_header("Last-Event-ID")) {
        const auto v = req.get_header_value("Last-Event-ID");
        std::from_chars(v.data(), v.data() + v.size(), start);
      }
      auto cursor = std::make_shared<std::uint64_t>(start);
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
            const auto keepalive = std::chrono::milliseconds(
                static_cast<std::int64_t>(options.stream_keepalive_s * 1000.0));
            auto& log = engine.events();
            while (!stopping) {
              const auto batch = log.after(*cursor, 256);
              if (!batch.empty()) {
                for (const auto& r : batch) {
                  const auto frame = sse_frame(r);
                  if (!sink.write(frame.data(), frame.size())) return false;
                  *cursor = r.seq;
                }
                return true;
              }
              if (log.closed()) break;
              if (!log.wait_after(*cursor, keepalive)) {
                if (stopping || log.closed()) break;
                static constexpr std::string_view ping = ": keepalive\n\n";
                if (!sink.write(ping.data(), ping.size())) return false;
                return true;
              }
            }
            sink.done();
            return true;
          });
    });

    server.Post("/geofences", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      geo::GeofenceBox fence;
      try {
        fence = body.get<geo::GeofenceBox>();
      } catch (const json::exception& e) {
        throw Error(Errc::InvalidGeofence, e.what());
      }
      send_json(res, engine.add_geofence(fence), 201);
    });

    server.Get("/geofences", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, engine.geofences());
    });

    server.Delete(R"(/geofences/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      engine.delete_geofence(req.matches[1].str());
      res.status = 204;
    });

    server.Get("/detections", [this](const httplib::Request& req, httplib::Response& res) {
      const double since = query_double(req, "since_t", -std::numeric_limits<double>::infinity());
      const auto cls = req.has_param("class") ? req.get_param_value("class") : std::string{};
      send_json(res, engine.detections(since, cls));
    });

    server.Get("/cues", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, engine.cues());
    });

    server.Post("/cues", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      if (!body.contains("mmsi") || !body.at("mmsi").is_number_unsigned())
        throw Error(Errc::InvalidArgument, "mmsi is required");
      const auto reason = body.value("reason", std::string{});
      send_json(res, engine.manual_cue(body.at("mmsi").get<Mmsi>(), reason), 201);
    });

    server.Post("/search/similar", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto k = body.value("k", std::size_t{10});
      if (body.contains("feature_id")) {
        send_json(res, engine.search(body.at("feature_id").get<std::string>(), k));
      } else if (body.contains("values")) {
        send_json(res, engine.search(body.at("values").get<std::vector<double>>(), k));
      } else {
        throw Error(Errc::InvalidArgument, "feature_id or values is required");
      }
    });

    server.Get("/projection", [this](const httplib::Request& req, httplib::Response& res) {
      std::optional<std::uint64_t> seed;
      std::optional<int> k;
      if (req.has_param("seed")) seed = query_uint(req, "seed", 0);
      if (req.has_param("k")) k = static_cast<int>(query_uint(req, "k", 0));
      send_json(res, engine.projection(seed, k));
    });

    server.Get("/analytics/counts", [this](const httplib::Request& req, httplib::Response& res) {
      const double since = query_double(req, "since_t", -std::numeric_limits<double>::infinity());
      const auto cls = req.has_param("class") ? req.get_param_value("class") : std::string{};
      send_json(res, engine.counts(cls, since));
    });

    server.Post("/replay", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      if (!body.contains("path")) throw Error(Errc::InvalidArgument, "path is required");
      const std::filesystem::path source = body.at("path").get<std::string>();
      double speed = 0.0;
      if (body.contains("speed")) {
        const auto& s = body.at("speed");
        if (s.is_string() && (s == "max" || s == "as-fast-as-possible")) speed = 0.0;
        else if (s.is_number() && s.get<double>() > 0) speed = s.get<double>();
        else throw Error(Errc::InvalidArgument, "speed must be > 0 or \"max\"");
      }
      std::error_code ec;
      if (!std::filesystem::is_regular_file(source, ec))
        throw Error(Errc::InvalidArgument, "no such input log " + source.string());

      std::lock_guard lock(replay_mu);
      auto& s = replays.emplace_back();
      s.id = replays.size();
      s.source = source;
      s.speed = speed;
      s.log_dir = options.replay_root / ("replay-" + std::to_string(s.id));
      std::filesystem::create_directories(s.log_dir);
      CopEngine::Options eo;
      eo.log_dir = s.log_dir;
      s.engine = std::make_unique<CopEngine>(engine.config(), eo);
      s.worker = std::thread([this, &s] {
        try {
          s.stats = replay_log(s.source, *s.engine, s.speed, &cancel_replays);
        } catch (const std::exception& e) {
          s.error = e.what();
        }
        s.done = true;
      });
      send_json(res, replay_json(s), 202);
    });

    server.Get(R"(/replay/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto id = std::stoull(req.matches[1].str());
      std::lock_guard lock(replay_mu);
      for (auto& s : replays)
        if (s.id == id) return send_json(res, replay_json(s));
      send_error(res, 404, "UnknownReplay", "no replay session " + std::to_string(id));
    });

    server.Get(R"(/replay/(\d+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto id = std::stoull(req.matches[1].str());
      std::lock_guard lock(replay_mu);
      for (auto& s : replays) {
        if (s.id != id) continue;
        EventQuery q;
        q.since_seq = query_uint(req, "since_seq", 0);
        return send_json(res, s.engine->events().query(q));
      }
      send_error(res, 404, "UnknownReplay", "no replay session " + std::to_string(id));
    });

    server.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
      auto j = engine.status();
      std::lock_guard lock(replay_mu);
      j["replays"] = json::array();
      for (auto& s : replays) j["replays"].push_back(replay_json(s));
      send_json(res, j);
    });

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.status == 404 && res.body.empty())
        send_error(res, 404, "NotFound", "no route for " + req.method + " " + req.path);
    });
  }
};

CopService::CopService(CopEngine& engine) : CopService(engine, Options{}) {}

CopService::CopService(CopEngine& engine, Options options)
    : impl_(std::make_unique<Impl>(engine, std::move(options))) {}

CopService::~CopService() = default;

bool CopService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int CopService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool CopService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void CopService::wait_until_ready() const { impl_->server.wait_until_ready(); }

void CopService::stop() { impl_->shutdown(); }

bool CopService::running() const { return impl_->server.is_running(); }

}  // namespace cop
