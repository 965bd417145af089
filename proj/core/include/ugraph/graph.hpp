#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ugraph/cell.hpp"
#include "ugraph/geo.hpp"

namespace ugraph {

enum class NodeKind : int {
  Viewpoint = 0,
  Road,
  Intersection,
  POI,
  AOI,
  TransitFacility,
};

enum class EdgeKind : int {
  OnSameStreet = 0,
  Crossing,
  Nearest,
  Near,
  Bounds,
  Intersects,
};

const char* node_kind_name(NodeKind k);
const char* edge_kind_name(EdgeKind k);
std::optional<NodeKind> node_kind_from_name(std::string_view name);
std::optional<EdgeKind> edge_kind_from_name(std::string_view name);

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::POI;
  std::string name;                          // empty when unnamed
  std::string category;                      // empty when uncategorized
  std::map<std::string, std::string> attrs;  // building use, district, ...
  Geometry geometry;
  GeoPoint anchor;  // representative point, consistent with geometry

  bool operator==(const GraphNode&) const = default;
};

// Undirected connectivity with directional annotations. distance_m and
// bearing_deg are measured between the edge's connection points: node
// anchors for point-geometry endpoints, the nearest point on the geometry
// for roads and AOI boundaries, the junction point for crossings. Bearing
// is src -> dst; traversing dst -> src reverses it by +180 mod 360.
struct GraphEdge {
  std::string src;
  std::string dst;
  EdgeKind kind = EdgeKind::Near;
  double distance_m = 0.0;
  double bearing_deg = 0.0;  // 0.0 when the connection points coincide
  std::optional<GeoPoint> crossing_point;  // Crossing / Intersects only
  GeoPoint src_point;  // connection point on the src side
  GeoPoint dst_point;  // connection point on the dst side

  bool operator==(const GraphEdge&) const = default;
};

struct GraphBuildConfig {
  double nearest_cutoff_m = 100.0;
  double near_threshold_m = 50.0;
  double snap_tolerance_m = 1.0;
  double bounds_buffer_m = 15.0;
  int cell_level = 14;

  void validate() const;
};

struct SpatialGraph {
  std::map<std::string, GraphNode> nodes;
  std::vector<GraphEdge> edges;
  // node id -> indices into `edges`, sorted; every edge appears under both
  // endpoints.
  std::map<std::string, std::vector<std::size_t>> adjacency;
  // anchor cell at cfg.cell_level -> node ids, sorted.
  std::map<CellId, std::vector<std::string>> cell_index;
  // packed cell (y<<32|x at cfg.cell_level) -> road ids whose segments touch
  // the cell. Rebuilt on load, never serialized; anchors long roads that the
  // anchor-based cell_index cannot see.
  std::map<std::uint64_t, std::vector<std::string>> road_segment_cells;
  GraphBuildConfig config;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::map<std::string, std::size_t> node_counts_by_kind() const;
  std::map<std::string, std::size_t> edge_counts_by_kind() const;

  const GraphNode& node(const std::string& id) const;
  bool has_node(const std::string& id) const { return nodes.count(id) > 0; }
  // Neighbor ids with the connecting edge index, sorted by neighbor id.
  std::vector<std::pair<std::string, std::size_t>> neighbors(const std::string& id) const;
  // Edge annotation as seen when traversing from `from` along edge `ei`.
  GraphEdge oriented_edge(std::size_t ei, const std::string& from) const;

  // Node ids whose anchors fall in the given cell or its 8 neighbors.
  std::vector<std::string> nodes_near_cell(const CellId& c) const;

  // Candidate road ids with any segment within radius_m of p (superset;
  // callers still measure exact distances). Sorted, deduplicated.
  std::vector<std::string> roads_near(const GeoPoint& p, double radius_m) const;

  // Rebuilds road_segment_cells from the current node set.
  void rebuild_road_segment_cells();
};

struct BuildIssue {
  std::string id;
  std::string message;
};

struct BuildReport {
  std::vector<BuildIssue> skipped_nodes;
  std::size_t unknown_kind_count = 0;
};

// Derives the Table-style relationship edges from a node set:
//   Nearest     viewpoint/POI/transit -> single closest road within cutoff
//   Near        road -> POI within near_threshold_m
//   Crossing    roads passing within snap_tolerance_m get a synthesized
//               Intersection node plus Crossing edges to each road
//   OnSameStreet POI pairs sharing the same Nearest road
//   Bounds      road within bounds_buffer_m of an AOI perimeter, outside it
//   Intersects  road crossing the AOI interior
// Output is independent of input order. Throws DataError on duplicate ids;
// nodes with invalid geometry are skipped and recorded in the report.
SpatialGraph build_graph(const std::vector<GraphNode>& nodes, const GraphBuildConfig& cfg,
                         BuildReport* report = nullptr);

// Inserts a Viewpoint node for an image and connects it to the closest
// road. Returns the node id (== image_id). Repeated identical calls are
// idempotent; a conflicting reuse of the id or no road within the cutoff
// throws DataError.
std::string anchor_image(SpatialGraph& g, const std::string& image_id, const GeoPoint& p);

struct Violation {
  std::string subject;  // node/edge identifier
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks referential integrity, adjacency symmetry, cell-index coverage,
// and that stored distances/bearings are reproducible from the endpoint
// geometries (0.1 m / 0.5 deg).
ValidationReport validate_graph(const SpatialGraph& g);

// Deterministic name for a synthesized junction node over the given road
// names (lexicographic order): "Intersection of A and B", three or more
// roads list as "A, B and C".
std::string intersection_name(std::vector<std::string> road_names);

}  // namespace ugraph
