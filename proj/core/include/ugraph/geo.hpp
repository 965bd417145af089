#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ugraph/error.hpp"

namespace ugraph {

// Mean Earth radius in meters. Every distance in this library assumes it.
inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDegToRad = 0.017453292519943295;
// Arc length of one degree of latitude, = pi * R / 180.
inline constexpr double kMetersPerDegree = 111194.92664455873;

struct GeoPoint {
  double lon = 0.0;  // degrees WGS84, [-180, 180]
  double lat = 0.0;  // degrees WGS84, [-90, 90]

  bool operator==(const GeoPoint&) const = default;
};

// Throws DataError unless lon/lat are finite and within bounds.
void validate_point(const GeoPoint& p);
bool point_is_valid(const GeoPoint& p);

enum class GeometryKind { Point, LineString, Polygon };

const char* geometry_kind_name(GeometryKind k);

// Point, polyline, or single-ring polygon (closed, first == last).
struct Geometry {
  GeometryKind kind = GeometryKind::Point;
  std::vector<GeoPoint> points;

  static Geometry point(GeoPoint p);
  static Geometry line(std::vector<GeoPoint> pts);
  static Geometry polygon(std::vector<GeoPoint> ring);

  // Representative point: the point itself, linestring midpoint (by arc
  // length), or polygon ring centroid.
  GeoPoint anchor() const;

  bool operator==(const Geometry&) const = default;
};

// Throws DataError if the geometry violates its shape invariants.
void validate_geometry(const Geometry& g);

enum class Cardinal : int { N = 0, NE, E, SE, S, SW, W, NW };

const char* cardinal_name(Cardinal c);
std::optional<Cardinal> cardinal_from_name(std::string_view name);

// Quantizes a bearing in [0, 360) into eight 45-degree sectors centered on
// the compass points; boundary bearings (22.5 mod 45) go to the
// clockwise-next sector.
Cardinal cardinal8(double bearing_deg);

struct Transition {
  double distance_m = 0.0;
  double bearing_deg = 0.0;       // [0, 360); meaningless when !has_bearing
  bool has_bearing = true;        // false for zero-distance moves

  Cardinal cardinal() const { return cardinal8(bearing_deg); }
  bool operator==(const Transition&) const = default;
};

Transition make_transition(double distance_m, double bearing_deg);
// Transition between two points; bearing omitted when they coincide.
Transition transition_between(const GeoPoint& from, const GeoPoint& to);

// Great-circle distance on the R = 6,371,000 m sphere.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Initial great-circle bearing from a to b in [0, 360). Throws NumericError
// when a == b (bearing undefined).
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

// Destination point at the given distance/bearing from the origin
// (spherical direct problem). Used to synthesize fixtures and displaced
// query points.
GeoPoint destination_point(const GeoPoint& origin, double distance_m, double bearing_deg);

struct NearestResult {
  double distance_m = 0.0;
  GeoPoint nearest;
};

// Minimum distance from p to the geometry (segments of a LineString or
// Polygon boundary, or the point itself) under a local equirectangular
// projection, plus the foot point. Accurate to city scale.
NearestResult point_to_geometry_m(const GeoPoint& p, const Geometry& g);

// Even/odd containment test for Polygon geometries (boundary counts as
// inside). Returns false for non-polygons.
bool polygon_contains(const Geometry& g, const GeoPoint& p);

// Intersection of two short segments in the local equirectangular plane
// anchored at a; returns the crossing point when the segments actually
// cross, or the closest-approach midpoint when they pass within tol_m.
std::optional<GeoPoint> segment_intersection(const GeoPoint& a1, const GeoPoint& a2,
                                             const GeoPoint& b1, const GeoPoint& b2,
                                             double tol_m);

// Minimum distance between two segments (meters, equirectangular).
double segment_to_segment_m(const GeoPoint& a1, const GeoPoint& a2,
                            const GeoPoint& b1, const GeoPoint& b2);

}  // namespace ugraph
