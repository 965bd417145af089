#include "ugraph/geojson.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ugraph {

namespace {

using json = nlohmann::ordered_json;

std::optional<NodeKind> kind_from_properties(const json& props) {
  if (props.contains("kind") && props["kind"].is_string()) {
    const std::string k = props["kind"].get<std::string>();
    if (auto known = node_kind_from_name(k)) return known;
    // Common lowercase spellings.
    if (k == "viewpoint") return NodeKind::Viewpoint;
    if (k == "road") return NodeKind::Road;
    if (k == "intersection") return NodeKind::Intersection;
    if (k == "poi") return NodeKind::POI;
    if (k == "aoi") return NodeKind::AOI;
    if (k == "transit" || k == "transit_facility") return NodeKind::TransitFacility;
    return std::nullopt;
  }
  if (props.contains("highway")) return NodeKind::Road;
  if (props.contains("public_transport") || props.contains("railway"))
    return NodeKind::TransitFacility;
  if (props.contains("amenity") || props.contains("shop") || props.contains("tourism"))
    return NodeKind::POI;
  if (props.contains("landuse") || props.contains("leisure") || props.contains("boundary"))
    return NodeKind::AOI;
  return std::nullopt;
}

GeoPoint parse_position(const json& pos) {
  if (!pos.is_array() || pos.size() < 2) throw DataError("position must be [lon, lat]");
  GeoPoint p{pos[0].get<double>(), pos[1].get<double>()};
  validate_point(p);
  return p;
}

Geometry parse_geometry(const json& geom) {
  if (!geom.is_object() || !geom.contains("type")) throw DataError("feature has no geometry type");
  const std::string type = geom["type"].get<std::string>();
  const json& coords = geom.at("coordinates");
  if (type == "Point") {
    return Geometry::point(parse_position(coords));
  }
  if (type == "LineString") {
    std::vector<GeoPoint> pts;
    for (const auto& c : coords) pts.push_back(parse_position(c));
    Geometry g = Geometry::line(std::move(pts));
    validate_geometry(g);
    return g;
  }
  if (type == "Polygon") {
    if (!coords.is_array() || coords.empty()) throw DataError("polygon has no rings");
    std::vector<GeoPoint> ring;
    for (const auto& c : coords[0]) ring.push_back(parse_position(c));
    Geometry g = Geometry::polygon(std::move(ring));
    validate_geometry(g);
    return g;
  }
  throw DataError("unsupported geometry type: " + type);
}

}  // namespace

std::vector<GraphNode> load_geojson(const std::string& text, LoadReport* report) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("GeoJSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw DataError("expected a GeoJSON FeatureCollection");
  }

  std::vector<GraphNode> nodes;
  const json features = doc.value("features", json::array());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (report) report->features_seen++;
    const json& f = features[i];
    GraphNode n;
    // Feature id, properties.id, or a positional fallback.
    if (f.contains("id")) {
      n.id = f["id"].is_string() ? f["id"].get<std::string>() : f["id"].dump();
    }
    const json props = f.value("properties", json::object());
    if (n.id.empty() && props.contains("id")) {
      n.id = props["id"].is_string() ? props["id"].get<std::string>() : props["id"].dump();
    }
    if (n.id.empty()) n.id = "feature_" + std::to_string(i);

    try {
      if (!f.contains("geometry") || f["geometry"].is_null())
        throw DataError("feature has no geometry");
      n.geometry = parse_geometry(f["geometry"]);
    } catch (const std::exception& e) {
      if (report) report->rejections.push_back({i, n.id, e.what()});
      continue;
    }
    n.anchor = n.geometry.anchor();

    auto kind = kind_from_properties(props);
    if (kind) {
      n.kind = *kind;
    } else {
      n.kind = NodeKind::POI;
      if (report) report->unknown_kind_count++;
    }
    for (const auto& [key, value] : props.items()) {
      if (key == "id" || key == "kind") continue;
      const std::string v = value.is_string() ? value.get<std::string>() : value.dump();
      if (key == "name") {
        n.name = v;
      } else if (key == "category") {
        n.category = v;
      } else {
        n.attrs[key] = v;
      }
    }
    if (report) report->nodes_loaded++;
    nodes.push_back(std::move(n));
  }
  return nodes;
}

std::vector<GraphNode> load_geojson_file(const std::string& path, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open GeoJSON file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_geojson(buf.str(), report);
}

std::string to_geojson(const std::vector<GraphNode>& nodes) {
  json features = json::array();
  for (const auto& n : nodes) {
    json geom;
    auto coords = [](const GeoPoint& p) { return json::array({p.lon, p.lat}); };
    switch (n.geometry.kind) {
      case GeometryKind::Point:
        geom = {{"type", "Point"}, {"coordinates", coords(n.geometry.points[0])}};
        break;
      case GeometryKind::LineString: {
        json cs = json::array();
        for (const auto& p : n.geometry.points) cs.push_back(coords(p));
        geom = {{"type", "LineString"}, {"coordinates", cs}};
        break;
      }
      case GeometryKind::Polygon: {
        json ring = json::array();
        for (const auto& p : n.geometry.points) ring.push_back(coords(p));
        geom = {{"type", "Polygon"}, {"coordinates", json::array({ring})}};
        break;
      }
    }
    json props = {{"kind", node_kind_name(n.kind)}};
    if (!n.name.empty()) props["name"] = n.name;
    if (!n.category.empty()) props["category"] = n.category;
    for (const auto& [k, v] : n.attrs) props[k] = v;
    features.push_back({{"type", "Feature"},
                        {"id", n.id},
                        {"properties", props},
                        {"geometry", geom}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump();
}

}  // namespace ugraph
