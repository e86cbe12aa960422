#pragma once

#include "cop/ais.hpp"
#include "cop/analytics.hpp"
#include "cop/event.hpp"
#include "cop/fmv.hpp"
#include "cop/fusion.hpp"
#include "cop/geo.hpp"
#include "cop/similarity.hpp"
#include "cop/track_store.hpp"
#include "json.hpp"

// Wire representations. Unavailable values serialize as null.
namespace cop {

namespace geo {
void to_json(nlohmann::json& j, const GeoPoint& p);
void from_json(const nlohmann::json& j, GeoPoint& p);
void to_json(nlohmann::json& j, const GeofenceBox& b);
void from_json(const nlohmann::json& j, GeofenceBox& b);
}  // namespace geo

namespace ais {
void to_json(nlohmann::json& j, const AisPositionReport& r);
void to_json(nlohmann::json& j, const AisStaticReport& r);
void to_json(nlohmann::json& j, const RawSentence& s);
}  // namespace ais

void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);
void to_json(nlohmann::json& j, const SnapshotEntry& e);
void to_json(nlohmann::json& j, const Track& t);
void to_json(nlohmann::json& j, const Prediction& p);

namespace fmv {
void to_json(nlohmann::json& j, const FrameMeta& f);
void from_json(const nlohmann::json& j, FrameMeta& f);
void to_json(nlohmann::json& j, const BBox& b);
void from_json(const nlohmann::json& j, BBox& b);
void to_json(nlohmann::json& j, const DetectionRecord& d);
void from_json(const nlohmann::json& j, DetectionInput& d);
}  // namespace fmv

namespace fusion {
void to_json(nlohmann::json& j, const CueTask& c);
void to_json(nlohmann::json& j, const CorrelationRecord& c);
}  // namespace fusion

namespace similarity {
void to_json(nlohmann::json& j, const SearchHit& h);
void to_json(nlohmann::json& j, const FeatureMetadata& m);
void from_json(const nlohmann::json& j, FeatureMetadata& m);
void to_json(nlohmann::json& j, const ProjectedPoint& p);
}  // namespace similarity

namespace analytics {
void to_json(nlohmann::json& j, const CountSeries& s);
}  // namespace analytics

}  // namespace cop
