#include "ugraph/graph_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ugraph/version.hpp"

namespace ugraph {

namespace {

using json = nlohmann::ordered_json;

json point_to_json(const GeoPoint& p) { return json::array({p.lon, p.lat}); }

GeoPoint point_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json geometry_to_json(const Geometry& g) {
  json pts = json::array();
  for (const auto& p : g.points) pts.push_back(point_to_json(p));
  return {{"type", geometry_kind_name(g.kind)}, {"points", pts}};
}

Geometry geometry_from_json(const json& j) {
  Geometry g;
  const std::string type = j.at("type").get<std::string>();
  if (type == "Point") g.kind = GeometryKind::Point;
  else if (type == "LineString") g.kind = GeometryKind::LineString;
  else if (type == "Polygon") g.kind = GeometryKind::Polygon;
  else throw DataError("unknown geometry kind: " + type);
  for (const auto& p : j.at("points")) g.points.push_back(point_from_json(p));
  validate_geometry(g);
  return g;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out.good()) throw DataError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace

std::string node_to_jsonl(const GraphNode& n) {
  json j;
  j["id"] = n.id;
  j["kind"] = node_kind_name(n.kind);
  if (!n.name.empty()) j["name"] = n.name;
  if (!n.category.empty()) j["category"] = n.category;
  if (!n.attrs.empty()) {
    json attrs = json::object();
    for (const auto& [k, v] : n.attrs) attrs[k] = v;
    j["attrs"] = attrs;
  }
  j["geometry"] = geometry_to_json(n.geometry);
  j["anchor"] = point_to_json(n.anchor);
  return j.dump();
}

GraphNode node_from_jsonl(const std::string& line) {
  const json j = json::parse(line);
  GraphNode n;
  n.id = j.at("id").get<std::string>();
  auto kind = node_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw DataError("unknown node kind in container: " + line);
  n.kind = *kind;
  n.name = j.value("name", "");
  n.category = j.value("category", "");
  if (j.contains("attrs")) {
    for (const auto& [k, v] : j["attrs"].items()) n.attrs[k] = v.get<std::string>();
  }
  n.geometry = geometry_from_json(j.at("geometry"));
  n.anchor = point_from_json(j.at("anchor"));
  return n;
}

std::string edge_to_jsonl(const GraphEdge& e) {
  json j;
  j["src"] = e.src;
  j["dst"] = e.dst;
  j["kind"] = edge_kind_name(e.kind);
  j["distance_m"] = e.distance_m;
  j["bearing_deg"] = e.bearing_deg;
  if (e.crossing_point) j["crossing_point"] = point_to_json(*e.crossing_point);
  j["src_point"] = point_to_json(e.src_point);
  j["dst_point"] = point_to_json(e.dst_point);
  return j.dump();
}

GraphEdge edge_from_jsonl(const std::string& line) {
  const json j = json::parse(line);
  GraphEdge e;
  e.src = j.at("src").get<std::string>();
  e.dst = j.at("dst").get<std::string>();
  auto kind = edge_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw DataError("unknown edge kind in container: " + line);
  e.kind = *kind;
  e.distance_m = j.at("distance_m").get<double>();
  e.bearing_deg = j.at("bearing_deg").get<double>();
  if (j.contains("crossing_point")) e.crossing_point = point_from_json(j["crossing_point"]);
  e.src_point = point_from_json(j.at("src_point"));
  e.dst_point = point_from_json(j.at("dst_point"));
  return e;
}

void save_graph(const SpatialGraph& g, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::string out;
    for (const auto& [id, n] : g.nodes) {
      out += node_to_jsonl(n);
      out += '\n';
    }
    write_file(dir + "/nodes.jsonl", out);
  }
  {
    std::string out;
    for (const auto& e : g.edges) {
      out += edge_to_jsonl(e);
      out += '\n';
    }
    write_file(dir + "/edges.jsonl", out);
  }
  json meta;
  meta["format"] = "ugraph-container";
  meta["version"] = kVersion;
  meta["config"] = {{"nearest_cutoff_m", g.config.nearest_cutoff_m},
                    {"near_threshold_m", g.config.near_threshold_m},
                    {"snap_tolerance_m", g.config.snap_tolerance_m},
                    {"bounds_buffer_m", g.config.bounds_buffer_m},
                    {"cell_level", g.config.cell_level}};
  json nk = json::object();
  for (const auto& [k, v] : g.node_counts_by_kind()) nk[k] = v;
  json ek = json::object();
  for (const auto& [k, v] : g.edge_counts_by_kind()) ek[k] = v;
  meta["counters"] = {{"nodes", g.node_count()},
                      {"edges", g.edge_count()},
                      {"nodes_by_kind", nk},
                      {"edges_by_kind", ek}};
  write_file(dir + "/meta.json", meta.dump(2) + "\n");
}

SpatialGraph load_graph(const std::string& dir) {
  SpatialGraph g;
  const json meta = json::parse(read_file(dir + "/meta.json"));
  if (meta.value("format", "") != "ugraph-container") {
    throw DataError("not a graph container: " + dir);
  }
  const json& cfg = meta.at("config");
  g.config.nearest_cutoff_m = cfg.at("nearest_cutoff_m").get<double>();
  g.config.near_threshold_m = cfg.at("near_threshold_m").get<double>();
  g.config.snap_tolerance_m = cfg.at("snap_tolerance_m").get<double>();
  g.config.bounds_buffer_m = cfg.at("bounds_buffer_m").get<double>();
  g.config.cell_level = cfg.at("cell_level").get<int>();

  std::istringstream nodes(read_file(dir + "/nodes.jsonl"));
  std::string line;
  while (std::getline(nodes, line)) {
    if (line.empty()) continue;
    GraphNode n = node_from_jsonl(line);
    const std::string id = n.id;
    if (!g.nodes.emplace(id, std::move(n)).second) {
      throw DataError("duplicate node id in container: " + id);
    }
  }
  std::istringstream edges(read_file(dir + "/edges.jsonl"));
  while (std::getline(edges, line)) {
    if (line.empty()) continue;
    g.edges.push_back(edge_from_jsonl(line));
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    g.adjacency[g.edges[i].src].push_back(i);
    g.adjacency[g.edges[i].dst].push_back(i);
  }
  for (const auto& [id, n] : g.nodes) {
    g.cell_index[cell_id(n.anchor, g.config.cell_level)].push_back(id);
  }
  g.rebuild_road_segment_cells();
  return g;
}

}  // namespace ugraph
