#include "ugraph/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ugraph {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_rad(double deg) { return deg * kDegToRad; }
double to_deg(double rad) { return rad / kDegToRad; }

double normalize_deg(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  if (d >= 360.0) d = 0.0;  // fmod can return 360.0 - eps rounding up
  return d;
}

// Local equirectangular projection anchored at `origin`: x east, y north,
// both in meters.
struct LocalFrame {
  double cos_lat;
  GeoPoint origin;

  explicit LocalFrame(const GeoPoint& o) : cos_lat(std::cos(to_rad(o.lat))), origin(o) {}

  std::array<double, 2> to_xy(const GeoPoint& p) const {
    return {(p.lon - origin.lon) * cos_lat * kMetersPerDegree,
            (p.lat - origin.lat) * kMetersPerDegree};
  }

  GeoPoint to_point(double x, double y) const {
    return {origin.lon + x / (cos_lat * kMetersPerDegree),
            origin.lat + y / kMetersPerDegree};
  }
};

// Nearest point on segment [a, b] to p, all in the same local frame.
std::array<double, 2> nearest_on_segment(const std::array<double, 2>& p,
                                         const std::array<double, 2>& a,
                                         const std::array<double, 2>& b) {
  const double dx = b[0] - a[0];
  const double dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  if (len2 <= 0.0) return a;
  double t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return {a[0] + t * dx, a[1] + t * dy};
}

}  // namespace

void validate_point(const GeoPoint& p) {
  if (!point_is_valid(p)) {
    throw DataError("invalid coordinate (" + std::to_string(p.lon) + ", " +
                    std::to_string(p.lat) + ")");
  }
}

bool point_is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 &&
         p.lon <= 180.0 && p.lat >= -90.0 && p.lat <= 90.0;
}

const char* geometry_kind_name(GeometryKind k) {
  switch (k) {
    case GeometryKind::Point: return "Point";
    case GeometryKind::LineString: return "LineString";
    case GeometryKind::Polygon: return "Polygon";
  }
  return "?";
}

Geometry Geometry::point(GeoPoint p) { return {GeometryKind::Point, {p}}; }

Geometry Geometry::line(std::vector<GeoPoint> pts) {
  return {GeometryKind::LineString, std::move(pts)};
}

Geometry Geometry::polygon(std::vector<GeoPoint> ring) {
  return {GeometryKind::Polygon, std::move(ring)};
}

void validate_geometry(const Geometry& g) {
  if (g.points.empty()) throw DataError("empty geometry");
  for (const auto& p : g.points) validate_point(p);
  switch (g.kind) {
    case GeometryKind::Point:
      if (g.points.size() != 1) throw DataError("point geometry must hold one coordinate");
      break;
    case GeometryKind::LineString:
      if (g.points.size() < 2) throw DataError("linestring needs at least 2 points");
      break;
    case GeometryKind::Polygon:
      if (g.points.size() < 4) throw DataError("polygon ring needs at least 4 points");
      if (!(g.points.front() == g.points.back()))
        throw DataError("polygon ring must be closed (first == last)");
      break;
  }
}

GeoPoint Geometry::anchor() const {
  switch (kind) {
    case GeometryKind::Point:
      return points.front();
    case GeometryKind::LineString: {
      // Midpoint by arc length along the polyline.
      double total = 0.0;
      for (std::size_t i = 1; i < points.size(); ++i)
        total += haversine_m(points[i - 1], points[i]);
      if (total <= 0.0) return points.front();
      double want = total / 2.0;
      for (std::size_t i = 1; i < points.size(); ++i) {
        const double seg = haversine_m(points[i - 1], points[i]);
        if (want <= seg && seg > 0.0) {
          const double t = want / seg;
          return {points[i - 1].lon + t * (points[i].lon - points[i - 1].lon),
                  points[i - 1].lat + t * (points[i].lat - points[i - 1].lat)};
        }
        want -= seg;
      }
      return points.back();
    }
    case GeometryKind::Polygon: {
      // Ring centroid, skipping the duplicated closing vertex.
      double lon = 0.0, lat = 0.0;
      const std::size_t n = points.size() - 1;
      for (std::size_t i = 0; i < n; ++i) {
        lon += points[i].lon;
        lat += points[i].lat;
      }
      return {lon / static_cast<double>(n), lat / static_cast<double>(n)};
    }
  }
  return points.front();
}

const char* cardinal_name(Cardinal c) {
  static constexpr const char* kNames[8] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  return kNames[static_cast<int>(c)];
}

std::optional<Cardinal> cardinal_from_name(std::string_view name) {
  static constexpr const char* kNames[8] = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  for (int i = 0; i < 8; ++i)
    if (name == kNames[i]) return static_cast<Cardinal>(i);
  return std::nullopt;
}

Cardinal cardinal8(double bearing_deg) {
  if (!std::isfinite(bearing_deg) || bearing_deg < 0.0 || bearing_deg >= 360.0) {
    throw DataError("bearing out of range [0,360): " + std::to_string(bearing_deg));
  }
  const int sector = static_cast<int>(std::floor(std::fmod(bearing_deg + 22.5, 360.0) / 45.0));
  return static_cast<Cardinal>(sector);
}

Transition make_transition(double distance_m, double bearing_deg) {
  Transition t;
  t.distance_m = distance_m;
  t.bearing_deg = normalize_deg(bearing_deg);
  t.has_bearing = true;
  return t;
}

Transition transition_between(const GeoPoint& from, const GeoPoint& to) {
  Transition t;
  t.distance_m = haversine_m(from, to);
  if (from == to || t.distance_m == 0.0) {
    t.distance_m = 0.0;
    t.bearing_deg = 0.0;
    t.has_bearing = false;
  } else {
    t.bearing_deg = initial_bearing_deg(from, to);
    t.has_bearing = true;
  }
  return t;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  validate_point(a);
  validate_point(b);
  const double phi1 = to_rad(a.lat);
  const double phi2 = to_rad(b.lat);
  const double dphi = to_rad(b.lat - a.lat);
  const double dlam = to_rad(b.lon - a.lon);
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlam / 2.0);
  double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b) {
  validate_point(a);
  validate_point(b);
  if (a == b) throw NumericError("bearing undefined for coincident points");
  const double phi1 = to_rad(a.lat);
  const double phi2 = to_rad(b.lat);
  const double dlam = to_rad(b.lon - a.lon);
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  return normalize_deg(to_deg(std::atan2(y, x)));
}

GeoPoint destination_point(const GeoPoint& origin, double distance_m, double bearing_deg) {
  validate_point(origin);
  const double delta = distance_m / kEarthRadiusM;
  const double theta = to_rad(bearing_deg);
  const double phi1 = to_rad(origin.lat);
  const double lam1 = to_rad(origin.lon);
  const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) +
                                std::cos(phi1) * std::sin(delta) * std::cos(theta));
  const double lam2 =
      lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                        std::cos(delta) - std::sin(phi1) * std::sin(phi2));
  GeoPoint out{to_deg(lam2), to_deg(phi2)};
  if (out.lon > 180.0) out.lon -= 360.0;
  if (out.lon < -180.0) out.lon += 360.0;
  return out;
}

NearestResult point_to_geometry_m(const GeoPoint& p, const Geometry& g) {
  validate_point(p);
  validate_geometry(g);
  if (g.kind == GeometryKind::Point) {
    return {haversine_m(p, g.points.front()), g.points.front()};
  }
  const LocalFrame frame(p);
  const auto pxy = frame.to_xy(p);
  double best = std::numeric_limits<double>::infinity();
  GeoPoint best_point = g.points.front();
  for (std::size_t i = 1; i < g.points.size(); ++i) {
    const auto a = frame.to_xy(g.points[i - 1]);
    const auto b = frame.to_xy(g.points[i]);
    const auto q = nearest_on_segment(pxy, a, b);
    const double dx = q[0] - pxy[0];
    const double dy = q[1] - pxy[1];
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d < best) {
      best = d;
      best_point = frame.to_point(q[0], q[1]);
    }
  }
  return {best, best_point};
}

bool polygon_contains(const Geometry& g, const GeoPoint& p) {
  if (g.kind != GeometryKind::Polygon || g.points.size() < 4) return false;
  // Even/odd rule in lon/lat space; adequate for city-scale rings.
  bool inside = false;
  const std::size_t n = g.points.size() - 1;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = g.points[i];
    const GeoPoint& b = g.points[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  if (!inside) {
    // Boundary points count as inside.
    const auto near = point_to_geometry_m(p, g);
    if (near.distance_m < 1e-9) return true;
  }
  return inside;
}

std::optional<GeoPoint> segment_intersection(const GeoPoint& a1, const GeoPoint& a2,
                                             const GeoPoint& b1, const GeoPoint& b2,
                                             double tol_m) {
  const LocalFrame frame(a1);
  const auto p = frame.to_xy(a1);
  const auto r = frame.to_xy(a2);
  const auto q = frame.to_xy(b1);
  const auto s = frame.to_xy(b2);
  const double rx = r[0] - p[0], ry = r[1] - p[1];
  const double sx = s[0] - q[0], sy = s[1] - q[1];
  const double denom = rx * sy - ry * sx;
  const double qpx = q[0] - p[0], qpy = q[1] - p[1];
  if (std::abs(denom) > 1e-12) {
    const double t = (qpx * sy - qpy * sx) / denom;
    const double u = (qpx * ry - qpy * rx) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) {
      return frame.to_point(p[0] + t * rx, p[1] + t * ry);
    }
  }
  if (tol_m > 0.0) {
    // Parallel or non-crossing: accept closest approach within tolerance.
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 2> ba{}, bb{};
    const std::array<std::array<double, 2>, 2> segA{p, r};
    const std::array<std::array<double, 2>, 2> segB{q, s};
    for (const auto& end : segA) {
      const auto n = nearest_on_segment(end, segB[0], segB[1]);
      const double d = std::hypot(n[0] - end[0], n[1] - end[1]);
      if (d < best) { best = d; ba = end; bb = n; }
    }
    for (const auto& end : segB) {
      const auto n = nearest_on_segment(end, segA[0], segA[1]);
      const double d = std::hypot(n[0] - end[0], n[1] - end[1]);
      if (d < best) { best = d; ba = n; bb = end; }
    }
    if (best <= tol_m) {
      return frame.to_point((ba[0] + bb[0]) / 2.0, (ba[1] + bb[1]) / 2.0);
    }
  }
  return std::nullopt;
}

double segment_to_segment_m(const GeoPoint& a1, const GeoPoint& a2,
                            const GeoPoint& b1, const GeoPoint& b2) {
  const LocalFrame frame(a1);
  const auto p = frame.to_xy(a1);
  const auto r = frame.to_xy(a2);
  const auto q = frame.to_xy(b1);
  const auto s = frame.to_xy(b2);
  const double rx = r[0] - p[0], ry = r[1] - p[1];
  const double sx = s[0] - q[0], sy = s[1] - q[1];
  const double denom = rx * sy - ry * sx;
  const double qpx = q[0] - p[0], qpy = q[1] - p[1];
  if (std::abs(denom) > 1e-12) {
    const double t = (qpx * sy - qpy * sx) / denom;
    const double u = (qpx * ry - qpy * rx) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  const std::array<std::array<double, 2>, 2> segA{p, r};
  const std::array<std::array<double, 2>, 2> segB{q, s};
  for (const auto& end : segA) {
    const auto n = nearest_on_segment(end, segB[0], segB[1]);
    best = std::min(best, std::hypot(n[0] - end[0], n[1] - end[1]));
  }
  for (const auto& end : segB) {
    const auto n = nearest_on_segment(end, segA[0], segA[1]);
    best = std::min(best, std::hypot(n[0] - end[0], n[1] - end[1]));
  }
  return best;
}

}  // namespace ugraph
