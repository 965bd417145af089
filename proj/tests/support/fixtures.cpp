#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace ugraph::testing {

SynthCity fixture_city(std::uint64_t seed) {
  SynthCityConfig cfg;
  cfg.rows = 50;
  cfg.cols = 50;  // 100 roads
  cfg.block_m = 150.0;
  cfg.pois = 50;
  cfg.aois = 5;
  cfg.images = 20;
  cfg.seed = seed;
  return gen_city(cfg);
}

namespace {

std::string key(const std::string& src, const std::string& dst, const std::string& kind,
                double distance) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "|%.2f", distance);
  return src + ">" + dst + ">" + kind + buf;
}

bool point_like(NodeKind k) {
  return k == NodeKind::Viewpoint || k == NodeKind::POI || k == NodeKind::TransitFacility;
}

}  // namespace

OracleGraph brute_force_build(std::vector<GraphNode> nodes, const GraphBuildConfig& cfg) {
  OracleGraph out;
  std::sort(nodes.begin(), nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  for (auto& n : nodes) n.anchor = n.geometry.anchor();

  std::vector<std::size_t> roads, aois, points, pois;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::Road) roads.push_back(i);
    if (nodes[i].kind == NodeKind::AOI) aois.push_back(i);
    if (point_like(nodes[i].kind)) points.push_back(i);
    if (nodes[i].kind == NodeKind::POI) pois.push_back(i);
  }

  // Nearest: full scan over every road.
  std::map<std::string, std::string> nearest_road_of;
  for (std::size_t p : points) {
    double best = cfg.nearest_cutoff_m + 1.0;
    std::size_t best_road = 0;
    bool found = false;
    GeoPoint foot;
    for (std::size_t r : roads) {
      const auto near = point_to_geometry_m(nodes[p].anchor, nodes[r].geometry);
      if (near.distance_m <= cfg.nearest_cutoff_m && (!found || near.distance_m < best)) {
        best = near.distance_m;
        best_road = r;
        foot = near.nearest;
        found = true;
      }
    }
    if (found) {
      out.edges.push_back({nodes[p].id, nodes[best_road].id, "nearest", best});
      if (nodes[p].kind == NodeKind::POI) nearest_road_of[nodes[p].id] = nodes[best_road].id;
    }
  }

  // Near: every road-POI pair within threshold.
  for (std::size_t p : pois) {
    for (std::size_t r : roads) {
      const auto near = point_to_geometry_m(nodes[p].anchor, nodes[r].geometry);
      if (near.distance_m <= cfg.near_threshold_m) {
        out.edges.push_back({nodes[r].id, nodes[p].id, "near", near.distance_m});
      }
    }
  }

  // OnSameStreet: POI pairs sharing a nearest road.
  for (std::size_t i = 0; i < pois.size(); ++i) {
    for (std::size_t j = i + 1; j < pois.size(); ++j) {
      const auto a = nearest_road_of.find(nodes[pois[i]].id);
      const auto b = nearest_road_of.find(nodes[pois[j]].id);
      if (a != nearest_road_of.end() && b != nearest_road_of.end() && a->second == b->second) {
        out.edges.push_back({nodes[pois[i]].id, nodes[pois[j]].id, "on_same_street",
                             haversine_m(nodes[pois[i]].anchor, nodes[pois[j]].anchor)});
      }
    }
  }

  // Crossings: quadratic road-pair segment scan, then the same greedy
  // clustering rule (hits sorted by location, merged within the snap
  // tolerance).
  struct Hit {
    GeoPoint p;
    std::size_t a, b;
  };
  std::vector<Hit> hits;
  for (std::size_t ia = 0; ia < roads.size(); ++ia) {
    for (std::size_t ib = ia + 1; ib < roads.size(); ++ib) {
      const auto& pa = nodes[roads[ia]].geometry.points;
      const auto& pb = nodes[roads[ib]].geometry.points;
      for (std::size_t s = 0; s + 1 < pa.size(); ++s) {
        for (std::size_t t = 0; t + 1 < pb.size(); ++t) {
          const auto hit =
              segment_intersection(pa[s], pa[s + 1], pb[t], pb[t + 1], cfg.snap_tolerance_m);
          if (hit) hits.push_back({*hit, roads[ia], roads[ib]});
        }
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) {
    return std::tie(x.p.lon, x.p.lat, x.a, x.b) < std::tie(y.p.lon, y.p.lat, y.a, y.b);
  });
  struct Junction {
    GeoPoint p;
    std::set<std::size_t> roads;
  };
  std::vector<Junction> junctions;
  const double cluster_m = std::max(cfg.snap_tolerance_m, 0.5);
  for (const auto& h : hits) {
    Junction* found = nullptr;
    for (auto& j : junctions) {
      if (haversine_m(j.p, h.p) <= cluster_m) {
        found = &j;
        break;
      }
    }
    if (!found) {
      junctions.push_back({h.p, {}});
      found = &junctions.back();
    }
    found->roads.insert(h.a);
    found->roads.insert(h.b);
  }
  std::map<std::string, int> ordinal;
  for (const auto& j : junctions) {
    std::string base = "x";
    std::vector<std::string> names;
    for (std::size_t r : j.roads) {
      base += "_" + nodes[r].id;
      names.push_back(nodes[r].name.empty() ? nodes[r].id : nodes[r].name);
    }
    const int n = ordinal[base]++;
    GraphNode xn;
    xn.id = n == 0 ? base : base + "_" + std::to_string(n);
    xn.kind = NodeKind::Intersection;
    xn.name = intersection_name(names);
    xn.geometry = Geometry::point(j.p);
    xn.anchor = j.p;
    for (std::size_t r : j.roads) {
      const auto near = point_to_geometry_m(j.p, nodes[r].geometry);
      out.edges.push_back({nodes[r].id, xn.id, "crossing", near.distance_m});
    }
    out.nodes.push_back(xn);
  }

  // Bounds / Intersects: quadratic road-AOI loops.
  for (std::size_t r : roads) {
    for (std::size_t a : aois) {
      const auto& road_pts = nodes[r].geometry.points;
      const auto& ring = nodes[a].geometry.points;
      bool crossing = false;
      for (std::size_t s = 0; s + 1 < road_pts.size() && !crossing; ++s) {
        for (std::size_t t = 0; t + 1 < ring.size() && !crossing; ++t) {
          if (segment_intersection(road_pts[s], road_pts[s + 1], ring[t], ring[t + 1], 0.0)) {
            crossing = true;
          }
        }
      }
      if (crossing || polygon_contains(nodes[a].geometry, road_pts[0])) {
        out.edges.push_back({nodes[r].id, nodes[a].id, "intersects", 0.0});
        continue;
      }
      double min_d = std::numeric_limits<double>::infinity();
      for (const auto& v : road_pts) {
        min_d = std::min(min_d, point_to_geometry_m(v, nodes[a].geometry).distance_m);
      }
      for (std::size_t t = 0; t + 1 < ring.size(); ++t) {
        min_d = std::min(min_d, point_to_geometry_m(ring[t], nodes[r].geometry).distance_m);
      }
      if (min_d <= cfg.bounds_buffer_m) {
        out.edges.push_back({nodes[r].id, nodes[a].id, "bounds", min_d});
      }
    }
  }

  for (auto& n : nodes) out.nodes.push_back(std::move(n));
  return out;
}

std::multiset<std::string> edge_keys(const SpatialGraph& g) {
  std::multiset<std::string> out;
  for (const auto& e : g.edges) {
    out.insert(key(e.src, e.dst, edge_kind_name(e.kind), e.distance_m));
  }
  return out;
}

std::multiset<std::string> edge_keys(const OracleGraph& g) {
  std::multiset<std::string> out;
  for (const auto& e : g.edges) out.insert(key(e.src, e.dst, e.kind, e.distance_m));
  return out;
}

std::set<std::string> node_keys(const SpatialGraph& g) {
  std::set<std::string> out;
  for (const auto& [id, n] : g.nodes) out.insert(id + "|" + node_kind_name(n.kind));
  return out;
}

std::set<std::string> node_keys(const OracleGraph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes) out.insert(n.id + "|" + node_kind_name(n.kind));
  return out;
}

std::map<std::string, int> exhaustive_destinations(const SpatialGraph& g,
                                                   const std::string& start, int max_hops) {
  std::map<std::string, int> best;
  std::vector<std::string> stack{start};
  std::set<std::string> on_path{start};

  std::function<void(const std::string&, int)> dfs = [&](const std::string& u, int hops) {
    for (const auto& [v, ei] : g.neighbors(u)) {
      if (on_path.count(v)) continue;
      const GraphEdge oriented = g.oriented_edge(ei, u);
      const bool continuation =
          g.nodes.at(u).kind == NodeKind::Intersection && oriented.kind == EdgeKind::Crossing;
      const int hv = hops + (continuation ? 0 : 1);
      if (hv > max_hops) continue;
      auto it = best.find(v);
      if (it == best.end() || hv < it->second) best[v] = hv;
      on_path.insert(v);
      dfs(v, hv);
      on_path.erase(v);
    }
  };
  dfs(start, 0);
  best.erase(start);
  return best;
}

SpatialGraph kallang_fixture() {
  const GeoPoint origin{103.8693, 1.31};
  // Foot of the viewpoint's perpendicular onto Kallang Road.
  const GeoPoint foot = destination_point(origin, 2.0, 342.0);
  // Kallang Road runs along bearing 72 (perpendicular to 342).
  const GeoPoint k0 = destination_point(foot, 30.0, 72.0 + 180.0);
  const GeoPoint k1 = destination_point(foot, 200.0, 72.0);
  // Geylang Road crosses Kallang 3.2 m east along it.
  const GeoPoint cross = destination_point(foot, 3.2, 72.0);
  const GeoPoint g0 = destination_point(cross, 80.0, 206.0 - 180.0);
  const GeoPoint g1 = destination_point(cross, 450.0, 206.0);
  // A park 20 m off Geylang Road, 375.8 m from the crossing.
  const GeoPoint park_foot = destination_point(cross, 375.8, 206.0);
  const GeoPoint park = destination_point(park_foot, 20.0, 206.0 + 90.0);

  std::vector<GraphNode> nodes;
  GraphNode kallang;
  kallang.id = "kallang";
  kallang.kind = NodeKind::Road;
  kallang.name = "Kallang Road";
  kallang.geometry = Geometry::line({k0, k1});
  nodes.push_back(kallang);

  GraphNode geylang;
  geylang.id = "geylang";
  geylang.kind = NodeKind::Road;
  geylang.name = "Geylang Road";
  geylang.geometry = Geometry::line({g0, g1});
  nodes.push_back(geylang);

  GraphNode parkn;
  parkn.id = "park";
  parkn.kind = NodeKind::POI;
  parkn.name = "Kallang Riverside Park North";
  parkn.category = "park";
  parkn.geometry = Geometry::point(park);
  nodes.push_back(parkn);

  GraphBuildConfig cfg;
  SpatialGraph g = build_graph(nodes, cfg);
  anchor_image(g, kKallangImageId, origin);
  return g;
}

}  // namespace ugraph::testing
