#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ugraph/graph.hpp"

namespace ugraph {

// One relational step. `relation` is an edge-kind name ("nearest", "near",
// "bounds", "intersects"), a street name (POIs on the same road), or one of
// the junction forms: "intersection" (two roads; rendered as a two-element
// tuple whose target names the junction) and "complex_crossing" (three or
// more roads).
struct Triple {
  std::string source;
  std::string relation;
  std::string target;

  bool operator==(const Triple&) const = default;
};

struct PathStep {
  enum class Kind { TripleStep, MoveStep };
  Kind kind = Kind::TripleStep;
  Triple triple;                       // TripleStep only
  std::optional<Transition> trailing;  // TripleStep only
  Transition move;                     // MoveStep only
  // Walk geometry backing the transitions; lets tests recompute distances
  // and bearings from coordinates.
  GeoPoint from;
  GeoPoint to;

  static PathStep triple_step(Triple t, std::optional<Transition> trailing, GeoPoint from,
                              GeoPoint to);
  static PathStep move_step(Transition m, GeoPoint from, GeoPoint to);

  bool operator==(const PathStep&) const = default;
};

struct AnnotatedPath {
  std::string image_id;
  GeoPoint origin;
  std::vector<PathStep> steps;
  std::string destination;
  int hops = 0;  // number of TripleSteps

  bool operator==(const AnnotatedPath&) const = default;
};

struct SrpConfig {
  int max_hops = 8;
  int min_hops = 2;
  double max_path_m = 2000.0;
  int per_hop_quota = 1;
  std::vector<NodeKind> excluded_kinds = {NodeKind::Intersection};  // as destinations

  void validate() const;
};

struct PathCandidate {
  std::string destination;      // node id
  GeometryKind geometry_kind = GeometryKind::Point;
  NodeKind destination_kind = NodeKind::POI;
  bool destination_named = false;
  int hops = 0;                 // triple hops of the stored path
  double geo_distance_m = 0.0;  // straight-line start -> destination
  double path_length_m = 0.0;   // sum of transition distances along the walk
  std::vector<std::string> path;  // node ids, start first
};

// Reachable destinations grouped by geometric type.
struct DestinationCandidates {
  std::vector<PathCandidate> polygonal;
  std::vector<PathCandidate> linear;
  std::vector<PathCandidate> point;

  std::vector<PathCandidate> all() const;
};

// 0/1-cost breadth-first search from `start`: crossing-continuation edges
// (leaving an Intersection node) cost nothing because they emit no triple.
// Candidates carry the fewest-triples path, tagged with hop count and
// geometric distance, each group sorted nearest-first.
DestinationCandidates discover_destinations(const SpatialGraph& g, const std::string& start,
                                            const SrpConfig& cfg);

// Filters by hop bounds, total walk length, and destination kind, then
// keeps per_hop_quota candidates per hop length (nearest first, named
// before unnamed at equal distance, id tie-break).
std::vector<PathCandidate> select_paths(const DestinationCandidates& candidates,
                                        const SrpConfig& cfg);

// Converts a node-id path into triples interleaved with transitions by
// walking the edge connection points: a trailing transition covers the
// source-to-target move of a triple, a standalone move covers travel along
// an entity between connection points. Transitions that round to 0.0 m are
// kept only between point-geometry endpoints.
AnnotatedPath annotate_path(const SpatialGraph& g, const std::vector<std::string>& path);

// Canonical text: triples "(source, relation, target)", transitions
// "(12.3m, 45°(NE))", steps joined by " -> ", then the closing sentence
// "Based on the spatial context, you can reach {destination} from the
// current image location at ({lon:.4f}, {lat:.4f})."
std::string render_srp(const AnnotatedPath& p);

std::string render_transition(const Transition& t);

// Accepts the canonical format plus the spaced variant ("(10.6 m, 52°NE)")
// and unicode arrows. Throws DataError with a character offset on
// malformed input.
AnnotatedPath parse_srp(const std::string& text);

// Entity names are sanitized before rendering so the notation stays
// parseable: parentheses/commas/arrows collapse to spaces.
std::string sanitize_entity_name(const std::string& name);

}  // namespace ugraph
