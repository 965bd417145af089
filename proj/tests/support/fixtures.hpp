#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ugraph/graph.hpp"
#include "ugraph/synth.hpp"

namespace ugraph::testing {

// The standard fixture city: 100 roads, 50 POIs, 5 AOIs, 20 viewpoints.
SynthCity fixture_city(std::uint64_t seed = 7);

// Independent quadratic edge derivation: same documented semantics as
// build_graph, no spatial index, plain pairwise loops over the node set.
// Shares only the geo primitives with the implementation under test.
struct OracleEdge {
  std::string src;
  std::string dst;
  std::string kind;
  double distance_m;
};

struct OracleGraph {
  std::vector<GraphNode> nodes;  // includes synthesized intersections
  std::vector<OracleEdge> edges;
};

OracleGraph brute_force_build(std::vector<GraphNode> nodes, const GraphBuildConfig& cfg);

// Canonical comparison keys: (src, dst, kind) with distances rounded to
// 0.01 m so floating-point noise cannot flip set equality.
std::multiset<std::string> edge_keys(const SpatialGraph& g);
std::multiset<std::string> edge_keys(const OracleGraph& g);
std::set<std::string> node_keys(const SpatialGraph& g);
std::set<std::string> node_keys(const OracleGraph& g);

// Exhaustive DFS over simple paths with the same 0/1 triple cost as the
// engine: destination -> minimum triple hops within max_hops.
std::map<std::string, int> exhaustive_destinations(const SpatialGraph& g,
                                                   const std::string& start, int max_hops);

// Kallang fixture: viewpoint 2.0 m at bearing 342 from Kallang Road, which
// crosses Geylang Road 3.2 m east along the road, with a park 20 m off
// Geylang. Returns the built graph; image id matches the training sample.
SpatialGraph kallang_fixture();

inline constexpr const char* kKallangImageId = "539125490832143";

}  // namespace ugraph::testing
