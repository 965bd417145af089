#pragma once

#include <string>

#include "ugraph/graph.hpp"

namespace ugraph {

// Two-file graph container plus a metadata header:
//   <dir>/nodes.jsonl   one node per line, id-sorted
//   <dir>/edges.jsonl   one edge per line, canonical order
//   <dir>/meta.json     config echo, per-kind counters, tool version
// Writing is deterministic: the same graph always produces the same bytes.
void save_graph(const SpatialGraph& g, const std::string& dir);
SpatialGraph load_graph(const std::string& dir);

std::string node_to_jsonl(const GraphNode& n);
std::string edge_to_jsonl(const GraphEdge& e);
GraphNode node_from_jsonl(const std::string& line);
GraphEdge edge_from_jsonl(const std::string& line);

}  // namespace ugraph
