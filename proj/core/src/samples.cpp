#include "ugraph/samples.hpp"

#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"

namespace ugraph {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(const char* format, double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string coordinates_repr(const GraphNode& n) {
  const char* shape = "POINT";
  if (n.geometry.kind == GeometryKind::LineString) shape = "LINE";
  if (n.geometry.kind == GeometryKind::Polygon) shape = "POLYGON";
  return std::string(shape) + "(lon: " + fmt("%.8f", n.anchor.lon) +
         ", lat: " + fmt("%.8f", n.anchor.lat) + ")";
}

// Resolves a display name back to a node: ids win, then unique names.
const GraphNode* resolve_entity(const SpatialGraph& g, const std::string& label) {
  if (auto it = g.nodes.find(label); it != g.nodes.end()) return &it->second;
  const GraphNode* match = nullptr;
  for (const auto& [id, n] : g.nodes) {
    if (sanitize_entity_name(n.name) == label) {
      if (match) return match;  // ambiguous: keep the first (id order)
      match = &n;
    }
  }
  return match;
}

}  // namespace

std::string relevant_entities_block(const SpatialGraph& g, const std::string& image_id,
                                    const AnnotatedPath& path) {
  // Image first, then entities in order of first mention.
  std::vector<std::pair<std::string, const GraphNode*>> entities;
  std::set<std::string> seen;
  auto add = [&](const std::string& label) {
    if (label.empty() || !seen.insert(label).second) return;
    entities.emplace_back(label, resolve_entity(g, label));
  };
  add(image_id);
  for (const auto& s : path.steps) {
    if (s.kind != PathStep::Kind::TripleStep) continue;
    add(s.triple.source);
    add(s.triple.target);
  }

  std::string out = "{";
  bool first = true;
  for (const auto& [label, node] : entities) {
    if (!first) out += ", ";
    first = false;
    out += "'" + label + "': {";
    if (node) {
      const std::string category =
          node->kind == NodeKind::Viewpoint
              ? "mapillary"
              : (node->category.empty() ? "None" : node->category);
      out += "'id': '" + node->id + "', 'category': '" + category +
             "', 'coordinates': '" + coordinates_repr(*node) + "'";
    } else {
      out += "'id': 'None', 'category': 'None', 'coordinates': 'None'";
    }
    out += "}";
  }
  out += "}";
  return out;
}

std::vector<TrainingSample> emit_training_samples(const SpatialGraph& g,
                                                  const std::string& image_id,
                                                  const std::vector<AnnotatedPath>& paths,
                                                  const std::string& image_ref,
                                                  const std::optional<std::string>& subgraph_ref,
                                                  int stage) {
  if (stage != 1 && stage != 2) throw ConfigError("stage must be 1 or 2");
  if (stage == 2 && !subgraph_ref) {
    throw ConfigError("stage 2 samples need a subgraph file for image " + image_id);
  }

  std::vector<TrainingSample> out;
  for (const auto& path : paths) {
    TrainingSample s;
    s.stage = stage;
    s.image_id = image_id;
    s.image_ref = image_ref;
    const std::string srp = render_srp(path);
    const std::string reach_sentence =
        "You can reach " + path.destination + " from the current location shown in the image "
        "with id " + image_id + " at (" + fmt("%.4f", path.origin.lon) + ", " +
        fmt("%.4f", path.origin.lat) + ").";
    if (stage == 1) {
      s.pair_type = "stage1_image_only";
      s.user_content = std::string("<image> ") + kStage1Instruction;
      s.positive_content = "Spatial Reasoning Path: " + srp;
    } else {
      s.pair_type = "stage2_fusion";
      s.graph_ref = *subgraph_ref;
      s.user_content = std::string("<graph><image> ") + kPathNotationNote +
                       " Based on the spatial context represented in graph and the spatial "
                       "reasoning path, you can reach " + path.destination +
                       " from the current location shown in the image with id " + image_id +
                       " at (" + fmt("%.4f", path.origin.lon) + ", " +
                       fmt("%.4f", path.origin.lat) + ").\n" +
                       "Here are relevant place entities informations: " +
                       relevant_entities_block(g, image_id, path);
      s.summarization = reach_sentence;
      s.image_coordinates =
          "(" + fmt("%.4f", path.origin.lon) + ", " + fmt("%.4f", path.origin.lat) + ")";
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string TrainingSample::to_jsonl() const {
  json j;
  if (stage == 1) {
    j["messages"] = json::array({{{"role", "user"}, {"content", user_content}}});
    j["positive_messages"] =
        json::array({json::array({{{"role", "user"}, {"content", positive_content}}})});
    j["label"] = 1;
    j["images"] = json::array({image_ref});
    j["graphs"] = json::array();
    j["pair_type"] = pair_type;
  } else {
    j["messages"] = json::array({{{"role", "user"}, {"content", user_content}},
                                 {{"role", "assistant"}, {"content", summarization}}});
    j["images"] = json::array({image_ref});
    j["graphs"] = json::array({graph_ref});
    j["summarization"] = summarization;
    j["image_coordinates"] = image_coordinates;
    j["mapillary_node"] = image_id;
    j["pair_type"] = pair_type;
  }
  return j.dump();
}

}  // namespace ugraph
