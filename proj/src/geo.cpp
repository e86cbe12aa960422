#include "cop/geo.hpp"

#include <algorithm>
#include <cmath>

#include "cop/error.hpp"

namespace cop::geo {

double normalize_lon(double lon) {
  double r = std::fmod(lon + 180.0, 360.0);
  if (r < 0) r += 360.0;
  r -= 180.0;
  if (r == -180.0) r = 180.0;
  return r;
}

void validate(const GeofenceBox& box) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(box.min_lat) || !finite(box.max_lat) || !finite(box.min_lon) ||
      !finite(box.max_lon))
    throw Error(Errc::InvalidGeofence, "non-finite bound");
  if (box.id.empty()) throw Error(Errc::InvalidGeofence, "empty id");
  if (box.min_lat < -90 || box.max_lat > 90)
    throw Error(Errc::InvalidGeofence, "latitude out of range");
  if (box.min_lon < -180 || box.max_lon > 180)
    throw Error(Errc::InvalidGeofence, "longitude out of range (antimeridian boxes unsupported)");
  if (box.min_lat > box.max_lat) throw Error(Errc::InvalidGeofence, "min_lat > max_lat");
  if (box.min_lon > box.max_lon)
    throw Error(Errc::InvalidGeofence, "min_lon > max_lon (antimeridian boxes unsupported)");
}

GeofenceBox make_geofence(std::string id, double min_lat, double max_lat, double min_lon,
                          double max_lon) {
  GeofenceBox box{std::move(id), min_lat, max_lat, min_lon, max_lon};
  validate(box);
  return box;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = phi2 - phi1;
  const double dlambda = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

GeoPoint destination(const GeoPoint& p, double bearing_deg, double distance_m) {
  if (distance_m == 0.0) return p;
  const double delta = distance_m / kEarthRadiusM;
  const double theta = deg2rad(bearing_deg);
  const double phi1 = deg2rad(p.lat);
  const double lambda1 = deg2rad(p.lon);
  const double sin_phi2 =
      std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double y = std::sin(theta) * std::sin(delta) * std::cos(phi1);
  const double x = std::cos(delta) - std::sin(phi1) * sin_phi2;
  const double lambda2 = lambda1 + std::atan2(y, x);
  return {rad2deg(phi2), normalize_lon(rad2deg(lambda2))};
}

GeoPoint dead_reckon(const GeoPoint& p, double cog_deg, double sog_knots, double dt_seconds) {
  if (!std::isfinite(sog_knots) || sog_knots < 0 || !std::isfinite(cog_deg))
    throw Error(Errc::UnavailableKinematics, "sog/cog unavailable");
  if (!(dt_seconds >= 0)) throw Error(Errc::InvalidArgument, "dt must be >= 0");
  return destination(p, cog_deg, sog_knots * kKnotToMps * dt_seconds);
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  if (a.lat == b.lat && normalize_lon(a.lon) == normalize_lon(b.lon))
    throw Error(Errc::CoincidentPoints, "bearing undefined for coincident points");
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dlambda = deg2rad(b.lon - a.lon);
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  double deg = std::fmod(rad2deg(std::atan2(y, x)) + 360.0, 360.0);
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

bool point_in_box(const GeoPoint& p, const GeofenceBox& box) {
  return p.lat >= box.min_lat && p.lat <= box.max_lat && p.lon >= box.min_lon &&
         p.lon <= box.max_lon;
}

double meters_per_deg_lat() { return kPi * kEarthRadiusM / 180.0; }

double meters_per_deg_lon(double lat_deg) {
  return kPi * kEarthRadiusM / 180.0 * std::cos(deg2rad(lat_deg));
}

}  // namespace cop::geo
