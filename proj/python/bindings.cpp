#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cop/ais.hpp"
#include "cop/config.hpp"
#include "cop/engine.hpp"
#include "cop/error.hpp"
#include "cop/fmv.hpp"
#include "cop/geo.hpp"
#include "cop/json_io.hpp"
#include "cop/replay.hpp"
#include "cop/similarity.hpp"
#include "cop/simulator.hpp"

namespace py = pybind11;
using nlohmann::json;

// Structured results cross the boundary as JSON text; the Python package
// decodes them.
namespace {

std::string dump(const json& j) { return j.dump(); }

cop::CopConfig config_from_text(const std::string& text) {
  if (text.empty()) return {};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw cop::Error(cop::Errc::InvalidConfig, e.what());
  }
  return cop::config_from_json(j);
}

json parse_payload(const std::string& text, cop::Errc code) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw cop::Error(code, e.what());
  }
}

py::tuple point(const cop::geo::GeoPoint& p) { return py::make_tuple(p.lat, p.lon); }

std::string decode_lines(const std::vector<std::string>& lines, double receipt_time) {
  cop::ais::AisDecoder decoder;
  json out = json::array();
  for (const auto& line : lines) {
    auto msg = decoder.decode_line(line, receipt_time);
    if (!msg) continue;
    std::visit([&](const auto& r) { out.push_back(json(r)); }, *msg);
  }
  json counters = {{"lines", decoder.counters().lines},
                   {"checksum_failures", decoder.counters().checksum_failures},
                   {"malformed", decoder.counters().malformed},
                   {"invalid_armor", decoder.counters().invalid_armor},
                   {"unsupported_types", decoder.counters().unsupported_types},
                   {"truncated", decoder.counters().truncated}};
  return dump({{"messages", out}, {"counters", counters}});
}

std::string simulate(const std::string& name_or_json, std::optional<std::uint64_t> seed,
                     const std::string& config_text) {
  auto scenario = name_or_json.find('{') == std::string::npos
                      ? cop::sim::reference_scenario(name_or_json)
                      : cop::sim::scenario_from_json(parse_payload(name_or_json, cop::Errc::InvalidScenario));
  if (seed) scenario.seed = *seed;
  auto out = cop::sim::run_scenario(scenario, config_from_text(config_text));
  return dump({{"ais_lines", out.ais_lines},
               {"fmv_lines", out.fmv_lines},
               {"truth", out.truth},
               {"config", cop::config_to_json(out.config)},
               {"scenario", cop::sim::scenario_to_json(scenario)}});
}

class PyEngine {
 public:
  PyEngine(const std::string& config_text, std::optional<std::filesystem::path> log_dir) {
    cop::CopEngine::Options options;
    options.log_dir = std::move(log_dir);
    engine_ = std::make_unique<cop::CopEngine>(config_from_text(config_text), std::move(options));
  }

  void process_line(const std::string& line) { engine_->process(cop::parse_input_record(line)); }

  void process_ais(const std::string& sentence, double t) {
    cop::InputRecord r;
    r.t = t;
    r.kind = cop::InputKind::Ais;
    r.line = sentence;
    engine_->process(std::move(r));
  }

  void process_fmv(const std::string& frame_json, double t) {
    cop::InputRecord r;
    r.t = t;
    r.kind = cop::InputKind::Fmv;
    r.payload = parse_payload(frame_json, cop::Errc::CorruptInputRecord);
    engine_->process(std::move(r));
  }

  std::string tracks() const { return dump(engine_->tracks().entries); }

  std::optional<std::string> track(std::uint32_t mmsi) const {
    auto t = engine_->track(mmsi);
    if (!t) return std::nullopt;
    return dump(*t);
  }

  std::string predict(std::uint32_t mmsi, double t) const { return dump(engine_->predict(mmsi, t)); }

  std::string events(const std::string& kind, std::uint64_t since_seq, std::optional<std::size_t> limit) const {
    cop::EventQuery q;
    if (!kind.empty()) {
      q.kind = cop::parse_event_kind(kind);
      if (!q.kind) throw cop::Error(cop::Errc::InvalidArgument, "unknown event kind " + kind);
    }
    q.since_seq = since_seq;
    if (limit) q.limit = *limit;
    json out = json::array();
    for (const auto& r : engine_->events().query(q)) out.push_back(json(r));
    return dump(out);
  }

  std::string add_geofence(const std::string& id, double min_lat, double max_lat, double min_lon, double max_lon) {
    cop::geo::GeofenceBox box{id, min_lat, max_lat, min_lon, max_lon};
    return dump(engine_->add_geofence(box));
  }

  std::string cue(std::uint32_t mmsi, const std::string& reason) { return dump(engine_->manual_cue(mmsi, reason)); }

  void add_feature(const std::string& feature_id, const std::vector<double>& values, const std::string& class_label) {
    cop::similarity::FeatureMetadata meta;
    meta.class_label = class_label;
    meta.timestamp = engine_->clock();
    engine_->add_feature(feature_id, values, meta);
  }

  std::string search_id(const std::string& feature_id, std::size_t k) const {
    return dump(engine_->search(feature_id, k));
  }
  std::string search_values(const std::vector<double>& values, std::size_t k) const {
    return dump(engine_->search(values, k));
  }

  std::string projection(std::optional<std::uint64_t> seed, std::optional<int> k) const {
    return dump(engine_->projection(seed, k));
  }

  std::string counts(const std::string& class_label, double since_t) const {
    return dump(engine_->counts(class_label, since_t));
  }

  std::string detections(double since_t, const std::string& class_label) const {
    return dump(engine_->detections(since_t, class_label));
  }

  std::string cues() const { return dump(engine_->cues()); }
  std::string geofences() const { return dump(engine_->geofences()); }
  std::string status() const { return dump(engine_->status()); }

  cop::CopEngine& engine() { return *engine_; }

 private:
  std::unique_ptr<cop::CopEngine> engine_;
};

}  // namespace

PYBIND11_MODULE(_copfusion, m) {
  m.doc() = "Maritime common operating picture fusion core";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> cop_error;
  cop_error.call_once_and_store_result(
      [&]() { return py::exception<cop::Error>(m, "CopError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cop::Error& e) {
      py::object args = py::make_tuple(std::string(cop::errc_name(e.code())), e.message());
      PyErr_SetObject(cop_error.get_stored().ptr(), args.ptr());
    }
  });

  m.def("haversine", [](double lat1, double lon1, double lat2, double lon2) {
    return cop::geo::haversine_distance({lat1, lon1}, {lat2, lon2});
  });
  m.def("initial_bearing", [](double lat1, double lon1, double lat2, double lon2) {
    return cop::geo::initial_bearing({lat1, lon1}, {lat2, lon2});
  });
  m.def("destination", [](double lat, double lon, double bearing, double distance) {
    return point(cop::geo::destination({lat, lon}, bearing, distance));
  });
  m.def("dead_reckon", [](double lat, double lon, double cog, double sog, double dt) {
    return point(cop::geo::dead_reckon({lat, lon}, cog, sog, dt));
  });
  m.def("point_in_box", [](double lat, double lon, double min_lat, double max_lat, double min_lon,
                           double max_lon) {
    return cop::geo::point_in_box({lat, lon}, cop::geo::make_geofence("q", min_lat, max_lat, min_lon, max_lon));
  });

  m.def("nmea_checksum", [](const std::string& body) { return static_cast<int>(cop::ais::nmea_checksum(body)); });
  m.def("decode_lines", &decode_lines, py::arg("lines"), py::arg("receipt_time") = 0.0);

  m.def("geolocate_pixel", [](const std::string& frame_json, double u, double v) {
    auto frame = parse_payload(frame_json, cop::Errc::InvalidFrame).get<cop::fmv::FrameMeta>();
    return point(cop::fmv::geolocate_pixel(frame, u, v));
  });

  m.def("project_2d", [](const std::vector<std::vector<double>>& rows, std::uint64_t seed, int k, int epochs) {
    std::vector<std::vector<double>> unit;
    unit.reserve(rows.size());
    for (const auto& r : rows) unit.push_back(cop::similarity::normalized(r));
    cop::similarity::ProjectionConfig cfg;
    cfg.seed = seed;
    cfg.k_neighbors = k;
    cfg.n_epochs = epochs;
    cfg.validate();
    std::vector<std::pair<double, double>> out;
    for (const auto& p : cop::similarity::project_2d(unit, cfg)) out.emplace_back(p[0], p[1]);
    return out;
  }, py::arg("rows"), py::arg("seed") = 0, py::arg("k") = 15, py::arg("epochs") = 200);

  m.def("reference_scenarios", &cop::sim::reference_scenario_names);
  m.def("simulate", &simulate, py::arg("scenario"), py::arg("seed") = py::none(), py::arg("config") = "");

  py::class_<PyEngine>(m, "Engine")
      .def(py::init<const std::string&, std::optional<std::filesystem::path>>(), py::arg("config") = "",
           py::arg("log_dir") = py::none())
      .def("process_line", &PyEngine::process_line)
      .def("process_ais", &PyEngine::process_ais, py::arg("sentence"), py::arg("t"))
      .def("process_fmv", &PyEngine::process_fmv, py::arg("frame"), py::arg("t"))
      .def("tick", [](PyEngine& e, double t) { e.engine().tick(t); })
      .def("finish", [](PyEngine& e) { e.engine().finish(); })
      .def("clock", [](PyEngine& e) { return e.engine().clock(); })
      .def("tracks", &PyEngine::tracks)
      .def("track", &PyEngine::track)
      .def("predict", &PyEngine::predict)
      .def("events", &PyEngine::events, py::arg("kind") = "", py::arg("since_seq") = 0,
           py::arg("limit") = py::none())
      .def("add_geofence", &PyEngine::add_geofence)
      .def("delete_geofence", [](PyEngine& e, const std::string& id) { e.engine().delete_geofence(id); })
      .def("geofences", &PyEngine::geofences)
      .def("cue", &PyEngine::cue)
      .def("cues", &PyEngine::cues)
      .def("detections", &PyEngine::detections, py::arg("since_t") = 0.0, py::arg("class_label") = "")
      .def("add_feature", &PyEngine::add_feature, py::arg("feature_id"), py::arg("values"),
           py::arg("class_label") = "")
      .def("search_id", &PyEngine::search_id)
      .def("search_values", &PyEngine::search_values)
      .def("projection", &PyEngine::projection, py::arg("seed") = py::none(), py::arg("k") = py::none())
      .def("counts", &PyEngine::counts, py::arg("class_label") = "", py::arg("since_t") = 0.0)
      .def("status", &PyEngine::status)
      .def("replay", [](PyEngine& e, const std::filesystem::path& path) {
        py::gil_scoped_release release;
        auto stats = cop::replay_log(path, e.engine(), 0.0);
        return std::make_pair(stats.records, stats.corrupt);
      });
}
