#include "ugraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace ugraph {

namespace {

constexpr double kDistanceTolM = 0.1;
constexpr double kBearingTolDeg = 0.5;

struct DegreeRect {
  double lon_min, lon_max, lat_min, lat_max;
};

// Cell coordinate ranges (at `level`) covering a degree rect.
struct CellRange {
  std::uint32_t x0, x1, y0, y1;
};

CellRange cells_covering(const DegreeRect& rect, int level) {
  const auto lo = cell_to_xy(cell_id({std::clamp(rect.lon_min, -180.0, 180.0),
                                      std::clamp(rect.lat_min, -90.0, 90.0)},
                                     level));
  const auto hi = cell_to_xy(cell_id({std::clamp(rect.lon_max, -180.0, 180.0),
                                      std::clamp(rect.lat_max, -90.0, 90.0)},
                                     level));
  return {lo.x, hi.x, lo.y, hi.y};
}

std::uint64_t pack_xy(std::uint32_t x, std::uint32_t y) {
  return (static_cast<std::uint64_t>(y) << 32) | x;
}

DegreeRect pad_rect(DegreeRect r, double pad_m) {
  const double dlat = pad_m / kMetersPerDegree;
  const double ref_lat = std::min(89.0, std::max(std::abs(r.lat_min), std::abs(r.lat_max)));
  const double cos_lat = std::max(0.01, std::cos(ref_lat * kDegToRad));
  const double dlon = pad_m / (kMetersPerDegree * cos_lat);
  return {r.lon_min - dlon, r.lon_max + dlon, r.lat_min - dlat, r.lat_max + dlat};
}

DegreeRect geometry_rect(const Geometry& g) {
  DegreeRect r{g.points[0].lon, g.points[0].lon, g.points[0].lat, g.points[0].lat};
  for (const auto& p : g.points) {
    r.lon_min = std::min(r.lon_min, p.lon);
    r.lon_max = std::max(r.lon_max, p.lon);
    r.lat_min = std::min(r.lat_min, p.lat);
    r.lat_max = std::max(r.lat_max, p.lat);
  }
  return r;
}

// Uniform grid over (lon, lat) used to cut candidate pairs during the
// build. Values are (node index, segment index) pairs.
class SegmentIndex {
 public:
  explicit SegmentIndex(int level) : level_(level) {}

  void insert(const DegreeRect& rect, std::uint32_t node, std::uint32_t segment) {
    for_cells(rect, [&](std::uint64_t key) { cells_[key].emplace_back(node, segment); });
  }

  // Collects unique node indices touching the padded rect, sorted.
  std::vector<std::uint32_t> query_nodes(const DegreeRect& rect, double pad_m) const {
    std::vector<std::uint32_t> out;
    for_cells(pad_rect(rect, pad_m), [&](std::uint64_t key) {
      auto it = cells_.find(key);
      if (it == cells_.end()) return;
      for (const auto& [node, seg] : it->second) out.push_back(node);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> query_segments(const DegreeRect& rect,
                                                                      double pad_m) const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for_cells(pad_rect(rect, pad_m), [&](std::uint64_t key) {
      auto it = cells_.find(key);
      if (it == cells_.end()) return;
      out.insert(out.end(), it->second.begin(), it->second.end());
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  template <typename Fn>
  void for_cells(const DegreeRect& rect, Fn&& fn) const {
    const CellRange r = cells_covering(rect, level_);
    for (std::uint32_t y = r.y0; y <= r.y1; ++y) {
      for (std::uint32_t x = r.x0; x <= r.x1; ++x) {
        fn(pack_xy(x, y));
      }
    }
  }

  int level_;
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> cells_;
};

GraphEdge make_edge(std::string src, std::string dst, EdgeKind kind, const GeoPoint& src_point,
                    const GeoPoint& dst_point) {
  GraphEdge e;
  e.src = std::move(src);
  e.dst = std::move(dst);
  e.kind = kind;
  e.src_point = src_point;
  e.dst_point = dst_point;
  const Transition t = transition_between(src_point, dst_point);
  e.distance_m = t.distance_m;
  e.bearing_deg = t.has_bearing ? t.bearing_deg : 0.0;
  return e;
}

bool is_point_like(NodeKind k) {
  return k == NodeKind::Viewpoint || k == NodeKind::POI || k == NodeKind::TransitFacility;
}

struct CrossingHit {
  GeoPoint point;
  std::uint32_t road_a;
  std::uint32_t road_b;
};

}  // namespace

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Viewpoint: return "Viewpoint";
    case NodeKind::Road: return "Road";
    case NodeKind::Intersection: return "Intersection";
    case NodeKind::POI: return "POI";
    case NodeKind::AOI: return "AOI";
    case NodeKind::TransitFacility: return "TransitFacility";
  }
  return "?";
}

const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::OnSameStreet: return "on_same_street";
    case EdgeKind::Crossing: return "crossing";
    case EdgeKind::Nearest: return "nearest";
    case EdgeKind::Near: return "near";
    case EdgeKind::Bounds: return "bounds";
    case EdgeKind::Intersects: return "intersects";
  }
  return "?";
}

std::optional<NodeKind> node_kind_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(NodeKind::TransitFacility); ++i) {
    if (name == node_kind_name(static_cast<NodeKind>(i))) return static_cast<NodeKind>(i);
  }
  return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(EdgeKind::Intersects); ++i) {
    if (name == edge_kind_name(static_cast<EdgeKind>(i))) return static_cast<EdgeKind>(i);
  }
  return std::nullopt;
}

void GraphBuildConfig::validate() const {
  if (nearest_cutoff_m <= 0 || near_threshold_m <= 0 || snap_tolerance_m <= 0 ||
      bounds_buffer_m <= 0) {
    throw ConfigError("graph thresholds must be > 0");
  }
  if (cell_level < 0 || cell_level > kMaxCellLevel) {
    throw ConfigError("cell_level must be in [0,24]");
  }
}

std::map<std::string, std::size_t> SpatialGraph::node_counts_by_kind() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, n] : nodes) out[node_kind_name(n.kind)]++;
  return out;
}

std::map<std::string, std::size_t> SpatialGraph::edge_counts_by_kind() const {
  std::map<std::string, std::size_t> out;
  for (const auto& e : edges) out[edge_kind_name(e.kind)]++;
  return out;
}

const GraphNode& SpatialGraph::node(const std::string& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw DataError("unknown node id: " + id);
  return it->second;
}

std::vector<std::pair<std::string, std::size_t>> SpatialGraph::neighbors(
    const std::string& id) const {
  std::vector<std::pair<std::string, std::size_t>> out;
  auto it = adjacency.find(id);
  if (it == adjacency.end()) return out;
  for (std::size_t ei : it->second) {
    const GraphEdge& e = edges[ei];
    out.emplace_back(e.src == id ? e.dst : e.src, ei);
  }
  std::sort(out.begin(), out.end());
  return out;
}

GraphEdge SpatialGraph::oriented_edge(std::size_t ei, const std::string& from) const {
  GraphEdge e = edges[ei];
  if (e.src == from) return e;
  std::swap(e.src, e.dst);
  std::swap(e.src_point, e.dst_point);
  if (e.distance_m > 0.0) e.bearing_deg = std::fmod(e.bearing_deg + 180.0, 360.0);
  return e;
}

std::vector<std::string> SpatialGraph::nodes_near_cell(const CellId& c) const {
  std::vector<std::string> out;
  auto take = [&](const CellId& cc) {
    auto it = cell_index.find(cc);
    if (it != cell_index.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  };
  take(c);
  for (const auto& n : cell_neighbors(c)) take(n);
  std::sort(out.begin(), out.end());
  return out;
}

std::string intersection_name(std::vector<std::string> road_names) {
  std::sort(road_names.begin(), road_names.end());
  road_names.erase(std::unique(road_names.begin(), road_names.end()), road_names.end());
  std::string out = "Intersection of ";
  for (std::size_t i = 0; i < road_names.size(); ++i) {
    if (i > 0) out += (i + 1 == road_names.size()) ? " and " : ", ";
    out += road_names[i];
  }
  return out;
}

SpatialGraph build_graph(const std::vector<GraphNode>& input_nodes, const GraphBuildConfig& cfg,
                         BuildReport* report) {
  cfg.validate();
  SpatialGraph g;
  g.config = cfg;

  // Intake: sort by id so everything downstream is order-independent.
  std::vector<GraphNode> nodes = input_nodes;
  std::sort(nodes.begin(), nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) throw DataError("duplicate node id: " + nodes[i].id);
  }

  std::vector<GraphNode> kept;
  kept.reserve(nodes.size());
  for (auto& n : nodes) {
    try {
      validate_geometry(n.geometry);
    } catch (const Error& err) {
      if (report) report->skipped_nodes.push_back({n.id, err.what()});
      continue;
    }
    n.anchor = n.geometry.anchor();
    kept.push_back(std::move(n));
  }
  nodes = std::move(kept);

  std::vector<std::uint32_t> roads, aois, points, pois;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    switch (nodes[i].kind) {
      case NodeKind::Road: roads.push_back(i); break;
      case NodeKind::AOI: aois.push_back(i); break;
      default:
        if (is_point_like(nodes[i].kind)) points.push_back(i);
        break;
    }
    if (nodes[i].kind == NodeKind::POI) pois.push_back(i);
  }

  // Segment indices for roads and AOI boundaries.
  SegmentIndex road_index(cfg.cell_level);
  for (std::uint32_t r : roads) {
    const auto& pts = nodes[r].geometry.points;
    for (std::uint32_t s = 0; s + 1 < pts.size(); ++s) {
      DegreeRect rect{std::min(pts[s].lon, pts[s + 1].lon), std::max(pts[s].lon, pts[s + 1].lon),
                      std::min(pts[s].lat, pts[s + 1].lat), std::max(pts[s].lat, pts[s + 1].lat)};
      road_index.insert(rect, r, s);
    }
  }
  SegmentIndex aoi_index(cfg.cell_level);
  for (std::uint32_t a : aois) {
    aoi_index.insert(geometry_rect(nodes[a].geometry), a, 0);
  }

  std::vector<GraphEdge> edges;

  // Nearest: point-like nodes attach to their single closest road. Ties go
  // to the lexicographically smallest road id (candidates arrive in id
  // order because node storage is id-sorted).
  std::unordered_map<std::uint32_t, std::uint32_t> nearest_road;  // poi idx -> road idx
  for (std::uint32_t p : points) {
    const GeoPoint& a = nodes[p].anchor;
    const DegreeRect here{a.lon, a.lon, a.lat, a.lat};
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_road = -1;
    GeoPoint best_foot;
    for (std::uint32_t r : road_index.query_nodes(here, cfg.nearest_cutoff_m)) {
      const auto near = point_to_geometry_m(a, nodes[r].geometry);
      if (near.distance_m <= cfg.nearest_cutoff_m && near.distance_m < best) {
        best = near.distance_m;
        best_road = r;
        best_foot = near.nearest;
      }
    }
    if (best_road >= 0) {
      const auto r = static_cast<std::uint32_t>(best_road);
      edges.push_back(make_edge(nodes[p].id, nodes[r].id, EdgeKind::Nearest, a, best_foot));
      if (nodes[p].kind == NodeKind::POI) nearest_road[p] = r;
    }
  }

  // Near: road within near_threshold_m of a POI.
  for (std::uint32_t p : pois) {
    const GeoPoint& a = nodes[p].anchor;
    const DegreeRect here{a.lon, a.lon, a.lat, a.lat};
    for (std::uint32_t r : road_index.query_nodes(here, cfg.near_threshold_m)) {
      const auto near = point_to_geometry_m(a, nodes[r].geometry);
      if (near.distance_m <= cfg.near_threshold_m) {
        edges.push_back(make_edge(nodes[r].id, nodes[p].id, EdgeKind::Near, near.nearest, a));
      }
    }
  }

  // OnSameStreet: POI pairs sharing the same Nearest road.
  {
    std::map<std::uint32_t, std::vector<std::uint32_t>> by_road;
    for (const auto& [p, r] : nearest_road) by_road[r].push_back(p);
    for (auto& [r, group] : by_road) {
      std::sort(group.begin(), group.end());
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = i + 1; j < group.size(); ++j) {
          edges.push_back(make_edge(nodes[group[i]].id, nodes[group[j]].id,
                                    EdgeKind::OnSameStreet, nodes[group[i]].anchor,
                                    nodes[group[j]].anchor));
        }
      }
    }
  }

  // Crossing: junction points where two road geometries pass within the
  // snap tolerance. Hits are clustered per location so three roads meeting
  // at one point synthesize a single Intersection node.
  std::vector<CrossingHit> hits;
  for (std::uint32_t ra : roads) {
    const auto& pts = nodes[ra].geometry.points;
    for (std::uint32_t s = 0; s + 1 < pts.size(); ++s) {
      DegreeRect rect{std::min(pts[s].lon, pts[s + 1].lon), std::max(pts[s].lon, pts[s + 1].lon),
                      std::min(pts[s].lat, pts[s + 1].lat), std::max(pts[s].lat, pts[s + 1].lat)};
      for (const auto& [rb, sb] : road_index.query_segments(rect, cfg.snap_tolerance_m)) {
        if (rb <= ra) continue;  // each unordered road pair once
        const auto& qts = nodes[rb].geometry.points;
        const auto hit = segment_intersection(pts[s], pts[s + 1], qts[sb], qts[sb + 1],
                                              cfg.snap_tolerance_m);
        if (hit) hits.push_back({*hit, ra, rb});
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const CrossingHit& a, const CrossingHit& b) {
    return std::tie(a.point.lon, a.point.lat, a.road_a, a.road_b) <
           std::tie(b.point.lon, b.point.lat, b.road_a, b.road_b);
  });

  struct Junction {
    GeoPoint point;
    std::vector<std::uint32_t> roads;
  };
  std::vector<Junction> junctions;
  const double cluster_m = std::max(cfg.snap_tolerance_m, 0.5);
  for (const auto& h : hits) {
    Junction* found = nullptr;
    for (auto& j : junctions) {
      if (haversine_m(j.point, h.point) <= cluster_m) {
        found = &j;
        break;
      }
    }
    if (!found) {
      junctions.push_back({h.point, {}});
      found = &junctions.back();
    }
    found->roads.push_back(h.road_a);
    found->roads.push_back(h.road_b);
  }

  std::unordered_set<std::string> used_ids;
  for (const auto& n : nodes) used_ids.insert(n.id);

  std::vector<GraphNode> synthesized;
  std::map<std::string, int> junction_ordinal;
  for (auto& j : junctions) {
    std::sort(j.roads.begin(), j.roads.end());
    j.roads.erase(std::unique(j.roads.begin(), j.roads.end()), j.roads.end());
    std::string base = "x";
    std::vector<std::string> names;
    for (std::uint32_t r : j.roads) {
      base += "_" + nodes[r].id;
      names.push_back(nodes[r].name.empty() ? nodes[r].id : nodes[r].name);
    }
    const int ordinal = junction_ordinal[base]++;
    GraphNode xn;
    xn.id = ordinal == 0 ? base : base + "_" + std::to_string(ordinal);
    while (!used_ids.insert(xn.id).second) xn.id += "_x";
    xn.kind = NodeKind::Intersection;
    xn.name = intersection_name(names);
    xn.geometry = Geometry::point(j.point);
    xn.anchor = j.point;
    for (std::uint32_t r : j.roads) {
      const auto near = point_to_geometry_m(j.point, nodes[r].geometry);
      edges.push_back(make_edge(nodes[r].id, xn.id, EdgeKind::Crossing, near.nearest, j.point));
      edges.back().crossing_point = j.point;
    }
    synthesized.push_back(std::move(xn));
  }

  // Bounds / Intersects: roads against AOI perimeters.
  {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint32_t r : roads) {
      const auto rect = geometry_rect(nodes[r].geometry);
      for (std::uint32_t a : aoi_index.query_nodes(rect, cfg.bounds_buffer_m)) {
        const std::uint64_t key = (static_cast<std::uint64_t>(r) << 32) | a;
        if (!seen.insert(key).second) continue;
        const auto& road_pts = nodes[r].geometry.points;
        const auto& ring = nodes[a].geometry.points;

        std::optional<GeoPoint> crossing;
        double min_d = std::numeric_limits<double>::infinity();
        GeoPoint road_near = road_pts[0], ring_near = ring[0];
        for (std::size_t s = 0; s + 1 < road_pts.size() && !crossing; ++s) {
          for (std::size_t t = 0; t + 1 < ring.size(); ++t) {
            if (auto hit = segment_intersection(road_pts[s], road_pts[s + 1], ring[t],
                                                ring[t + 1], 0.0)) {
              crossing = hit;
              break;
            }
          }
        }
        if (crossing) {
          edges.push_back(make_edge(nodes[r].id, nodes[a].id, EdgeKind::Intersects, *crossing,
                                    *crossing));
          edges.back().crossing_point = crossing;
          continue;
        }
        if (polygon_contains(nodes[a].geometry, road_pts[0])) {
          // Wholly inside the AOI: runs through the interior.
          const GeoPoint mid = nodes[r].anchor;
          edges.push_back(make_edge(nodes[r].id, nodes[a].id, EdgeKind::Intersects, mid, mid));
          edges.back().crossing_point = mid;
          continue;
        }
        // Non-crossing segment pairs attain their minimum distance at a
        // vertex of one set against a segment of the other.
        for (const GeoPoint& v : road_pts) {
          const auto na = point_to_geometry_m(v, nodes[a].geometry);
          if (na.distance_m < min_d) {
            min_d = na.distance_m;
            road_near = v;
            ring_near = na.nearest;
          }
        }
        for (std::size_t t = 0; t + 1 < ring.size(); ++t) {
          const auto nr = point_to_geometry_m(ring[t], nodes[r].geometry);
          if (nr.distance_m < min_d) {
            min_d = nr.distance_m;
            road_near = nr.nearest;
            ring_near = ring[t];
          }
        }
        if (min_d <= cfg.bounds_buffer_m) {
          edges.push_back(
              make_edge(nodes[r].id, nodes[a].id, EdgeKind::Bounds, road_near, ring_near));
        }
      }
    }
  }

  for (auto& n : synthesized) nodes.push_back(std::move(n));

  std::sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return std::tie(a.src, a.dst, a.kind, a.distance_m) <
           std::tie(b.src, b.dst, b.kind, b.distance_m);
  });

  for (auto& n : nodes) {
    const std::string id = n.id;
    g.nodes.emplace(id, std::move(n));
  }
  g.edges = std::move(edges);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    g.adjacency[g.edges[i].src].push_back(i);
    g.adjacency[g.edges[i].dst].push_back(i);
  }
  for (const auto& [id, n] : g.nodes) {
    g.cell_index[cell_id(n.anchor, cfg.cell_level)].push_back(id);
  }
  g.rebuild_road_segment_cells();
  return g;
}

void SpatialGraph::rebuild_road_segment_cells() {
  road_segment_cells.clear();
  for (const auto& [id, n] : nodes) {
    if (n.kind != NodeKind::Road) continue;
    const auto& pts = n.geometry.points;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
      const DegreeRect rect{std::min(pts[s].lon, pts[s + 1].lon),
                            std::max(pts[s].lon, pts[s + 1].lon),
                            std::min(pts[s].lat, pts[s + 1].lat),
                            std::max(pts[s].lat, pts[s + 1].lat)};
      const CellRange r = cells_covering(rect, config.cell_level);
      for (std::uint32_t y = r.y0; y <= r.y1; ++y) {
        for (std::uint32_t x = r.x0; x <= r.x1; ++x) {
          auto& bucket = road_segment_cells[pack_xy(x, y)];
          if (bucket.empty() || bucket.back() != id) bucket.push_back(id);
        }
      }
    }
  }
}

std::vector<std::string> SpatialGraph::roads_near(const GeoPoint& p, double radius_m) const {
  const DegreeRect rect = pad_rect({p.lon, p.lon, p.lat, p.lat}, radius_m);
  const CellRange r = cells_covering(rect, config.cell_level);
  std::vector<std::string> out;
  for (std::uint32_t y = r.y0; y <= r.y1; ++y) {
    for (std::uint32_t x = r.x0; x <= r.x1; ++x) {
      auto it = road_segment_cells.find(pack_xy(x, y));
      if (it == road_segment_cells.end()) continue;
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string anchor_image(SpatialGraph& g, const std::string& image_id, const GeoPoint& p) {
  validate_point(p);
  if (auto it = g.nodes.find(image_id); it != g.nodes.end()) {
    if (it->second.kind == NodeKind::Viewpoint && it->second.anchor == p) return image_id;
    throw DataError("node id already in use with different data: " + image_id);
  }

  double best = std::numeric_limits<double>::infinity();
  const GraphNode* best_road = nullptr;
  GeoPoint best_foot;
  for (const auto& id : g.roads_near(p, g.config.nearest_cutoff_m)) {
    const GraphNode& n = g.nodes.at(id);
    const auto near = point_to_geometry_m(p, n.geometry);
    if (near.distance_m <= g.config.nearest_cutoff_m && near.distance_m < best) {
      best = near.distance_m;
      best_road = &n;
      best_foot = near.nearest;
    }
  }
  if (!best_road) {
    throw DataError("unanchorable image " + image_id + ": no road within " +
                    std::to_string(g.config.nearest_cutoff_m) + " m");
  }

  GraphNode vn;
  vn.id = image_id;
  vn.kind = NodeKind::Viewpoint;
  vn.geometry = Geometry::point(p);
  vn.anchor = p;
  g.nodes.emplace(image_id, std::move(vn));
  g.edges.push_back(make_edge(image_id, best_road->id, EdgeKind::Nearest, p, best_foot));
  const std::size_t ei = g.edges.size() - 1;
  g.adjacency[image_id].push_back(ei);
  g.adjacency[best_road->id].push_back(ei);
  auto& bucket = g.cell_index[cell_id(p, g.config.cell_level)];
  bucket.push_back(image_id);
  std::sort(bucket.begin(), bucket.end());
  return image_id;
}

ValidationReport validate_graph(const SpatialGraph& g) {
  ValidationReport report;
  auto flag = [&](std::string subject, std::string message) {
    report.violations.push_back({std::move(subject), std::move(message)});
  };

  for (const auto& [id, n] : g.nodes) {
    if (id != n.id) flag(id, "node stored under mismatched key");
    try {
      validate_geometry(n.geometry);
    } catch (const Error& e) {
      flag(id, std::string("invalid geometry: ") + e.what());
      continue;
    }
    if (haversine_m(n.anchor, n.geometry.anchor()) > kDistanceTolM) {
      flag(id, "anchor inconsistent with geometry");
    }
    const CellId c = cell_id(n.anchor, g.config.cell_level);
    auto it = g.cell_index.find(c);
    if (it == g.cell_index.end() ||
        !std::binary_search(it->second.begin(), it->second.end(), id)) {
      flag(id, "node missing from cell index");
    }
  }

  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const GraphEdge& e = g.edges[i];
    const std::string label = "edge#" + std::to_string(i) + " " + e.src + "->" + e.dst;
    if (e.src == e.dst) flag(label, "self-loop edge");
    const auto si = g.nodes.find(e.src);
    const auto di = g.nodes.find(e.dst);
    if (si == g.nodes.end() || di == g.nodes.end()) {
      flag(label, "dangling endpoint");
      continue;
    }
    auto adjacent = [&](const std::string& id) {
      auto it = g.adjacency.find(id);
      return it != g.adjacency.end() &&
             std::find(it->second.begin(), it->second.end(), i) != it->second.end();
    };
    if (!adjacent(e.src) || !adjacent(e.dst)) flag(label, "adjacency not symmetric");

    // Distance must be reproducible from the endpoint geometries.
    double expect = e.distance_m;
    double expect_bearing = e.bearing_deg;
    bool check_bearing = e.distance_m > kDistanceTolM;
    const GraphNode& sn = si->second;
    const GraphNode& dn = di->second;
    switch (e.kind) {
      case EdgeKind::Nearest: {
        const auto near = point_to_geometry_m(sn.anchor, dn.geometry);
        expect = near.distance_m;
        if (check_bearing) expect_bearing = initial_bearing_deg(sn.anchor, near.nearest);
        break;
      }
      case EdgeKind::Near: {
        const auto near = point_to_geometry_m(dn.anchor, sn.geometry);
        expect = near.distance_m;
        if (check_bearing) expect_bearing = initial_bearing_deg(near.nearest, dn.anchor);
        break;
      }
      case EdgeKind::OnSameStreet: {
        expect = haversine_m(sn.anchor, dn.anchor);
        if (check_bearing) expect_bearing = initial_bearing_deg(sn.anchor, dn.anchor);
        break;
      }
      case EdgeKind::Crossing: {
        const auto near = point_to_geometry_m(dn.anchor, sn.geometry);
        expect = near.distance_m;
        check_bearing = false;
        break;
      }
      case EdgeKind::Bounds:
      case EdgeKind::Intersects: {
        expect = haversine_m(e.src_point, e.dst_point);
        check_bearing = false;
        break;
      }
    }
    if (std::abs(expect - e.distance_m) > kDistanceTolM) {
      flag(label, "distance not reproducible from geometry");
    }
    if (check_bearing) {
      double diff = std::abs(expect_bearing - e.bearing_deg);
      diff = std::min(diff, 360.0 - diff);
      if (diff > kBearingTolDeg) flag(label, "bearing not reproducible from geometry");
    }
  }
  return report;
}

}  // namespace ugraph
