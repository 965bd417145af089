#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ugraph/graph.hpp"

namespace ugraph {

struct LoadRejection {
  std::size_t feature_index = 0;
  std::string id;
  std::string reason;
};

struct LoadReport {
  std::size_t features_seen = 0;
  std::size_t nodes_loaded = 0;
  std::size_t unknown_kind_count = 0;  // mapped to POI with a warning
  std::vector<LoadRejection> rejections;
};

// Reads an RFC 7946 FeatureCollection into graph nodes. Feature kind comes
// from properties.kind when present, otherwise from common OSM-style
// category keys (highway -> Road, amenity/shop -> POI, ...); anything else
// maps to POI and bumps unknown_kind_count. Invalid geometries reject the
// feature into the report instead of failing the load. Malformed JSON
// throws DataError with the byte offset.
std::vector<GraphNode> load_geojson(const std::string& text, LoadReport* report = nullptr);
std::vector<GraphNode> load_geojson_file(const std::string& path, LoadReport* report = nullptr);

// Writes nodes back out as a FeatureCollection (used by the synthetic city
// generator and tests).
std::string to_geojson(const std::vector<GraphNode>& nodes);

}  // namespace ugraph
