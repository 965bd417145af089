#pragma once

#include <string>
#include <vector>

#include "ugraph/graph.hpp"

namespace ugraph {

struct SubgraphEntry {
  GraphNode node;
  double distance_m = 0.0;   // from the (nearest) center anchor
  double bearing_deg = 0.0;  // center -> node; 0 when coincident
  bool has_bearing = false;
  std::string via;           // one-hop entries: the nearby node they hang off

  bool operator==(const SubgraphEntry&) const = default;
};

struct Subgraph {
  std::vector<std::string> center_ids;
  std::vector<GraphNode> centers;
  std::vector<SubgraphEntry> nearby;   // sorted by (distance, id)
  std::vector<SubgraphEntry> onehop;   // sorted by (distance, id)
  std::vector<GraphEdge> edges;        // induced on all included nodes

  bool operator==(const Subgraph&) const = default;

  std::size_t total_nodes() const { return centers.size() + nearby.size() + onehop.size(); }
  bool contains(const std::string& id) const;
  const GraphNode* find(const std::string& id) const;
};

struct ExtractConfig {
  double radius_m = 200.0;
  std::size_t max_nearby = 10;
  std::size_t max_onehop = 12;

  void validate() const;
};

// Localized neighborhood around a center node: direct neighbors plus
// anything within radius_m (nearest first, capped at max_nearby), then
// one-hop neighbors of those (capped at max_onehop), with every induced
// edge retained. Deterministic: ties break on ascending node id.
Subgraph extract_subgraph(const SpatialGraph& g, const std::string& center,
                          const ExtractConfig& cfg);

// Versioned JSON serialization with a payload checksum; parse rejects
// unknown versions, truncated documents, and checksum mismatches.
std::string serialize_subgraph(const Subgraph& s);
Subgraph parse_subgraph(const std::string& bytes);

inline constexpr const char* kSubgraphSchemaVersion = "1";

}  // namespace ugraph
