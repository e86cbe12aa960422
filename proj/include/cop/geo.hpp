#pragma once

#include <string>

namespace cop::geo {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kKnotToMps = 0.514444;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

/// Latitude in [-90, 90], longitude in (-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Closed, axis-aligned lat/lon box. Boxes spanning the antimeridian are
/// rejected by make_geofence().
struct GeofenceBox {
  std::string id;
  double min_lat = 0.0;
  double max_lat = 0.0;
  double min_lon = 0.0;
  double max_lon = 0.0;

  friend bool operator==(const GeofenceBox&, const GeofenceBox&) = default;
};

/// Maps any longitude into (-180, 180].
double normalize_lon(double lon);

/// Validates bounds and ordering; throws Error(InvalidGeofence).
GeofenceBox make_geofence(std::string id, double min_lat, double max_lat, double min_lon,
                          double max_lon);
void validate(const GeofenceBox& box);

/// Great-circle distance in meters.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Destination along an initial bearing after `sog_knots * dt_seconds`.
/// Throws Error(UnavailableKinematics) for negative/non-finite sog or cog.
GeoPoint dead_reckon(const GeoPoint& p, double cog_deg, double sog_knots, double dt_seconds);

/// Destination at a distance in meters along an initial bearing.
GeoPoint destination(const GeoPoint& p, double bearing_deg, double distance_m);

/// Forward azimuth a->b in [0, 360). Throws Error(CoincidentPoints) if a == b.
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

bool point_in_box(const GeoPoint& p, const GeofenceBox& box);

/// Meters per degree of latitude / longitude at a latitude on the sphere.
double meters_per_deg_lat();
double meters_per_deg_lon(double lat_deg);

}  // namespace cop::geo
