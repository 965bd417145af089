#include "ugraph/subgraph.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "ugraph/rng.hpp"

namespace ugraph {

namespace {

using json = nlohmann::ordered_json;

json point_to_json(const GeoPoint& p) { return json::array({p.lon, p.lat}); }
GeoPoint point_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json node_to_json(const GraphNode& n) {
  json j;
  j["id"] = n.id;
  j["kind"] = node_kind_name(n.kind);
  j["name"] = n.name;
  j["category"] = n.category;
  json attrs = json::object();
  for (const auto& [k, v] : n.attrs) attrs[k] = v;
  j["attrs"] = attrs;
  json pts = json::array();
  for (const auto& p : n.geometry.points) pts.push_back(point_to_json(p));
  j["geometry"] = {{"type", geometry_kind_name(n.geometry.kind)}, {"points", pts}};
  j["anchor"] = point_to_json(n.anchor);
  return j;
}

GraphNode node_from_json(const json& j) {
  GraphNode n;
  n.id = j.at("id").get<std::string>();
  auto kind = node_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw DataError("unknown node kind in subgraph");
  n.kind = *kind;
  n.name = j.at("name").get<std::string>();
  n.category = j.at("category").get<std::string>();
  for (const auto& [k, v] : j.at("attrs").items()) n.attrs[k] = v.get<std::string>();
  const json& geom = j.at("geometry");
  const std::string type = geom.at("type").get<std::string>();
  if (type == "Point") n.geometry.kind = GeometryKind::Point;
  else if (type == "LineString") n.geometry.kind = GeometryKind::LineString;
  else if (type == "Polygon") n.geometry.kind = GeometryKind::Polygon;
  else throw DataError("unknown geometry kind in subgraph");
  for (const auto& p : geom.at("points")) n.geometry.points.push_back(point_from_json(p));
  n.anchor = point_from_json(j.at("anchor"));
  return n;
}

json entry_to_json(const SubgraphEntry& e) {
  json j;
  j["node"] = node_to_json(e.node);
  j["distance_m"] = e.distance_m;
  j["bearing_deg"] = e.bearing_deg;
  j["has_bearing"] = e.has_bearing;
  if (!e.via.empty()) j["via"] = e.via;
  return j;
}

SubgraphEntry entry_from_json(const json& j) {
  SubgraphEntry e;
  e.node = node_from_json(j.at("node"));
  e.distance_m = j.at("distance_m").get<double>();
  e.bearing_deg = j.at("bearing_deg").get<double>();
  e.has_bearing = j.at("has_bearing").get<bool>();
  e.via = j.value("via", "");
  return e;
}

json edge_to_json(const GraphEdge& e) {
  json j;
  j["src"] = e.src;
  j["dst"] = e.dst;
  j["kind"] = edge_kind_name(e.kind);
  j["distance_m"] = e.distance_m;
  j["bearing_deg"] = e.bearing_deg;
  if (e.crossing_point) j["crossing_point"] = point_to_json(*e.crossing_point);
  j["src_point"] = point_to_json(e.src_point);
  j["dst_point"] = point_to_json(e.dst_point);
  return j;
}

GraphEdge edge_from_json(const json& j) {
  GraphEdge e;
  e.src = j.at("src").get<std::string>();
  e.dst = j.at("dst").get<std::string>();
  auto kind = edge_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw DataError("unknown edge kind in subgraph");
  e.kind = *kind;
  e.distance_m = j.at("distance_m").get<double>();
  e.bearing_deg = j.at("bearing_deg").get<double>();
  if (j.contains("crossing_point")) e.crossing_point = point_from_json(j["crossing_point"]);
  e.src_point = point_from_json(j.at("src_point"));
  e.dst_point = point_from_json(j.at("dst_point"));
  return e;
}

}  // namespace

bool Subgraph::contains(const std::string& id) const { return find(id) != nullptr; }

const GraphNode* Subgraph::find(const std::string& id) const {
  for (const auto& c : centers)
    if (c.id == id) return &c;
  for (const auto& e : nearby)
    if (e.node.id == id) return &e.node;
  for (const auto& e : onehop)
    if (e.node.id == id) return &e.node;
  return nullptr;
}

void ExtractConfig::validate() const {
  if (radius_m <= 0 || max_nearby == 0 || max_onehop == 0) {
    throw ConfigError("extract config values must be > 0");
  }
}

Subgraph extract_subgraph(const SpatialGraph& g, const std::string& center,
                          const ExtractConfig& cfg) {
  cfg.validate();
  const GraphNode& cn = g.node(center);

  Subgraph s;
  s.center_ids.push_back(center);
  s.centers.push_back(cn);

  // Candidates: direct neighbors union radius query over anchor cells.
  std::set<std::string> candidates;
  for (const auto& [nid, ei] : g.neighbors(center)) candidates.insert(nid);

  const double dlat = cfg.radius_m / kMetersPerDegree;
  const double cos_lat = std::max(0.01, std::cos(cn.anchor.lat * kDegToRad));
  const double dlon = cfg.radius_m / (kMetersPerDegree * cos_lat);
  const int level = g.config.cell_level;
  const auto lo = cell_to_xy(cell_id({std::clamp(cn.anchor.lon - dlon, -180.0, 180.0),
                                      std::clamp(cn.anchor.lat - dlat, -90.0, 90.0)},
                                     level));
  const auto hi = cell_to_xy(cell_id({std::clamp(cn.anchor.lon + dlon, -180.0, 180.0),
                                      std::clamp(cn.anchor.lat + dlat, -90.0, 90.0)},
                                     level));
  for (std::uint32_t y = lo.y; y <= hi.y; ++y) {
    for (std::uint32_t x = lo.x; x <= hi.x; ++x) {
      auto it = g.cell_index.find(cell_from_xy(level, x, y));
      if (it == g.cell_index.end()) continue;
      for (const auto& id : it->second) {
        if (id == center) continue;
        if (haversine_m(cn.anchor, g.nodes.at(id).anchor) <= cfg.radius_m) candidates.insert(id);
      }
    }
  }
  candidates.erase(center);

  std::vector<SubgraphEntry> nearby;
  for (const auto& id : candidates) {
    const GraphNode& n = g.nodes.at(id);
    SubgraphEntry e;
    e.node = n;
    const Transition t = transition_between(cn.anchor, n.anchor);
    e.distance_m = t.distance_m;
    e.bearing_deg = t.has_bearing ? t.bearing_deg : 0.0;
    e.has_bearing = t.has_bearing;
    nearby.push_back(std::move(e));
  }
  std::sort(nearby.begin(), nearby.end(), [](const SubgraphEntry& a, const SubgraphEntry& b) {
    return std::tie(a.distance_m, a.node.id) < std::tie(b.distance_m, b.node.id);
  });
  if (nearby.size() > cfg.max_nearby) nearby.resize(cfg.max_nearby);
  s.nearby = std::move(nearby);

  std::set<std::string> included;
  included.insert(center);
  for (const auto& e : s.nearby) included.insert(e.node.id);

  // One-hop ring: graph neighbors of nearby nodes; via is the first nearby
  // node (in nearest-first order) adjacent to the candidate.
  std::map<std::string, std::string> via_of;
  for (const auto& nb : s.nearby) {
    for (const auto& [nid, ei] : g.neighbors(nb.node.id)) {
      if (included.count(nid)) continue;
      via_of.emplace(nid, nb.node.id);
    }
  }
  std::vector<SubgraphEntry> onehop;
  for (const auto& [id, via] : via_of) {
    const GraphNode& n = g.nodes.at(id);
    SubgraphEntry e;
    e.node = n;
    e.via = via;
    const Transition t = transition_between(cn.anchor, n.anchor);
    e.distance_m = t.distance_m;
    e.bearing_deg = t.has_bearing ? t.bearing_deg : 0.0;
    e.has_bearing = t.has_bearing;
    onehop.push_back(std::move(e));
  }
  std::sort(onehop.begin(), onehop.end(), [](const SubgraphEntry& a, const SubgraphEntry& b) {
    return std::tie(a.distance_m, a.node.id) < std::tie(b.distance_m, b.node.id);
  });
  if (onehop.size() > cfg.max_onehop) onehop.resize(cfg.max_onehop);
  s.onehop = std::move(onehop);
  for (const auto& e : s.onehop) included.insert(e.node.id);

  for (const auto& e : g.edges) {
    if (included.count(e.src) && included.count(e.dst)) s.edges.push_back(e);
  }
  return s;
}

std::string serialize_subgraph(const Subgraph& s) {
  json payload;
  payload["center_ids"] = s.center_ids;
  json centers = json::array();
  for (const auto& c : s.centers) centers.push_back(node_to_json(c));
  payload["centers"] = centers;
  json nearby = json::array();
  for (const auto& e : s.nearby) nearby.push_back(entry_to_json(e));
  payload["nearby"] = nearby;
  json onehop = json::array();
  for (const auto& e : s.onehop) onehop.push_back(entry_to_json(e));
  payload["onehop"] = onehop;
  json edges = json::array();
  for (const auto& e : s.edges) edges.push_back(edge_to_json(e));
  payload["edges"] = edges;

  const std::string body = payload.dump();
  json doc;
  doc["schema"] = "ugraph-subgraph";
  doc["schema_version"] = kSubgraphSchemaVersion;
  doc["checksum"] = fnv1a64(body);
  doc["payload"] = std::move(payload);
  return doc.dump();
}

Subgraph parse_subgraph(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("subgraph parse error: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema", "") != "ugraph-subgraph") {
    throw DataError("not a subgraph document");
  }
  if (doc.value("schema_version", "") != kSubgraphSchemaVersion) {
    throw DataError("unsupported subgraph schema version: " +
                    doc.value("schema_version", "<missing>"));
  }
  const json& payload = doc.at("payload");
  if (doc.at("checksum").get<std::uint64_t>() != fnv1a64(payload.dump())) {
    throw DataError("subgraph checksum mismatch (corrupted document)");
  }
  Subgraph s;
  for (const auto& id : payload.at("center_ids")) s.center_ids.push_back(id.get<std::string>());
  for (const auto& c : payload.at("centers")) s.centers.push_back(node_from_json(c));
  for (const auto& e : payload.at("nearby")) s.nearby.push_back(entry_from_json(e));
  for (const auto& e : payload.at("onehop")) s.onehop.push_back(entry_from_json(e));
  for (const auto& e : payload.at("edges")) s.edges.push_back(edge_from_json(e));
  return s;
}

}  // namespace ugraph
