// Fusion service daemon: ingests AIS and FMV inputs and serves the HTTP API.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "cop/engine.hpp"
#include "cop/error.hpp"
#include "cop/net.hpp"
#include "cop/replay.hpp"
#include "cop/service.hpp"

namespace {

bool is_tcp(const std::string& source) {
  return !source.empty() && !std::filesystem::exists(source) && cop::parse_tcp_address(source).has_value();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maritime common operating picture service"};
  std::string config_path, ais, fmv, log_dir = "cop-log", replay, features;
  std::string host;
  int port = 0;
  double speed = 0.0;
  bool once = false;
  app.add_option("--config", config_path, "Config file (JSON)");
  app.add_option("--ais", ais, "AIVDM input: file path or tcp://host:port");
  app.add_option("--fmv", fmv, "FMV frame records: file path or tcp://host:port");
  app.add_option("--log-dir", log_dir, "Directory for events.ndjson and inputs.ndjson");
  app.add_option("--replay", replay, "Recorded inputs.ndjson to replay instead of live input");
  app.add_option("--speed", speed, "Replay speed multiplier; 0 = as fast as possible")->check(CLI::NonNegativeNumber);
  app.add_option("--features", features, "Feature vector records to load at startup");
  app.add_option("--host", host, "Listen address (overrides config)");
  app.add_option("--port", port, "Listen port (overrides config)");
  app.add_flag("--once", once, "Process file inputs, print status and exit without serving");
  CLI11_PARSE(app, argc, argv);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    auto config = config_path.empty() ? cop::CopConfig{} : cop::load_config(config_path);
    if (!host.empty()) config.host = host;
    if (port > 0) config.port = port;
    std::filesystem::create_directories(log_dir);
    cop::CopEngine::Options options;
    options.log_dir = log_dir;
    cop::CopEngine engine(config, options);

    const double now = cop::system_wall_clock();
    if (!features.empty()) {
      std::size_t bad = 0;
      for (auto& r : cop::load_feature_file(features, now, &bad)) engine.process(std::move(r));
      if (bad) std::cerr << "skipped " << bad << " malformed feature records\n";
    }

    std::atomic<bool> stop{false};
    std::vector<std::thread> workers;
    if (!replay.empty()) {
      const auto stats = cop::replay_log(replay, engine, speed, &stop);
      std::cerr << "replayed " << stats.records << " records (" << stats.corrupt << " corrupt) in "
                << stats.wall_seconds << " s\n";
    } else {
      const std::string ais_file = is_tcp(ais) ? std::string{} : ais;
      const std::string fmv_file = is_tcp(fmv) ? std::string{} : fmv;
      if (!ais_file.empty() || !fmv_file.empty()) {
        std::size_t bad = 0;
        for (auto& r : cop::load_live_files(ais_file, fmv_file, now, &bad)) engine.process(std::move(r));
        engine.finish();
        if (bad) std::cerr << "skipped " << bad << " malformed frame records\n";
      }
      for (const auto& [source, kind] : {std::pair{ais, cop::InputKind::Ais}, std::pair{fmv, cop::InputKind::Fmv}}) {
        if (!is_tcp(source)) continue;
        const auto addr = *cop::parse_tcp_address(source);
        workers.emplace_back([&engine, &stop, addr, kind = kind] {
          cop::read_tcp_lines(addr, [&](std::string line) {
            cop::InputRecord r;
            r.t = cop::system_wall_clock();
            r.kind = kind;
            if (kind == cop::InputKind::Ais) {
              r.line = std::move(line);
            } else {
              try {
                r.payload = nlohmann::json::parse(line);
              } catch (const std::exception&) {
                return;
              }
            }
            engine.process(std::move(r));
          }, stop);
        });
      }
      if (!workers.empty())
        workers.emplace_back([&engine, &stop] {
          while (!stop) {
            std::this_thread::sleep_for(std::chrono::seconds(1));
            engine.tick(cop::system_wall_clock());
          }
        });
    }

    if (once) {
      stop = true;
      for (auto& w : workers) w.join();
      std::cout << engine.status().dump(2) << '\n';
      return 0;
    }

    cop::CopService::Options service_options;
    service_options.replay_root = std::filesystem::path(log_dir) / "replays";
    cop::CopService service(engine, service_options);
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      stop = true;
      service.stop();
    });
    std::cerr << "listening on " << config.host << ':' << config.port << '\n';
    if (!service.listen(config.host, config.port)) {
      std::cerr << "cannot listen on " << config.host << ':' << config.port << '\n';
      stop = true;
      pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
      for (auto& w : workers) w.join();
      return 1;
    }
    waiter.join();
    for (auto& w : workers) w.join();
  } catch (const cop::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
