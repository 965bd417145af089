#include "ugraph/describe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace ugraph {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string coord_str(const GeoPoint& p) {
  return "(" + fmt("%.5f", p.lon) + ", " + fmt("%.5f", p.lat) + ")";
}

std::string display_name(const GraphNode& n) { return n.name.empty() ? n.id : n.name; }

// Attribute keys rendered first, in this order; anything else follows
// lexicographically.
const char* kAttrOrder[] = {"building use", "historic district", "architect",
                            "building type", "street",            "housenumber",
                            "postcode",     "planning area",      "district",
                            "city",         "country"};

std::string attrs_clause(const GraphNode& n) {
  std::string out;
  std::set<std::string> done;
  auto append = [&](const std::string& k, const std::string& v) {
    out += ", " + k + ": " + v;
  };
  if (!n.category.empty()) append("category", n.category);
  for (const char* key : kAttrOrder) {
    auto it = n.attrs.find(key);
    if (it != n.attrs.end()) {
      append(it->first, it->second);
      done.insert(it->first);
    }
  }
  for (const auto& [k, v] : n.attrs) {
    if (!done.count(k)) append(k, v);
  }
  return out;
}

std::string node_line(const GraphNode& n) {
  std::string out = "- " + display_name(n) + " (id: " + n.id +
                    ", type: " + node_kind_name(n.kind) +
                    ", geometry: " + geometry_kind_name(n.geometry.kind) + ")";
  out += attrs_clause(n);
  out += ", at " + coord_str(n.anchor);
  return out;
}

std::string entry_line(const SubgraphEntry& e, bool with_via) {
  std::string out = node_line(e.node);
  out += ", " + fmt("%.1f", e.distance_m) + "m ";
  out += e.has_bearing ? cardinal_name(cardinal8(e.bearing_deg)) : "-";
  out += " of center";
  if (with_via && !e.via.empty()) out += ", via " + e.via;
  return out;
}

std::string edge_line(const GraphEdge& e, const Subgraph& s) {
  const GraphNode* src = s.find(e.src);
  const GraphNode* dst = s.find(e.dst);
  std::string out = "- (" + (src ? display_name(*src) : e.src) + ", " +
                    edge_kind_name(e.kind) + ", " + (dst ? display_name(*dst) : e.dst) + ")";
  out += ", distance: " + fmt("%.1f", e.distance_m) + "m";
  out += ", direction: ";
  out += e.distance_m > 0.0 ? cardinal_name(cardinal8(e.bearing_deg)) : "-";
  if (e.crossing_point) out += ", crossing at " + coord_str(*e.crossing_point);
  return out;
}

}  // namespace

std::string SubgraphDescription::full_text() const {
  std::string out = "Network Overview:\n" + overview + "\n\nCenter Nodes:\n" + center_section;
  out += "\n\nNearby Locations:\n" + nearby_section;
  out += "\n\nLocations Connected to Nearby Areas:\n" + onehop_section;
  out += "\n\nConnections in the Network:\n" + connections_section;
  return out;
}

SubgraphDescription describe_subgraph(const Subgraph& s) {
  SubgraphDescription d;
  d.overview = "This network contains " + std::to_string(s.total_nodes()) +
               " locations, with " + std::to_string(s.centers.size()) +
               " center nodes and " + std::to_string(s.edges.size()) + " connections.";

  for (std::size_t i = 0; i < s.centers.size(); ++i) {
    if (i) d.center_section += "\n";
    d.center_section += node_line(s.centers[i]);
  }
  if (s.centers.empty()) d.center_section = "(none)";

  for (std::size_t i = 0; i < s.nearby.size(); ++i) {
    if (i) d.nearby_section += "\n";
    d.nearby_section += entry_line(s.nearby[i], false);
  }
  if (s.nearby.empty()) d.nearby_section = "(none)";

  for (std::size_t i = 0; i < s.onehop.size(); ++i) {
    if (i) d.onehop_section += "\n";
    d.onehop_section += entry_line(s.onehop[i], true);
  }
  if (s.onehop.empty()) d.onehop_section = "(none)";

  // Center-incident connections first, then connections among the rest;
  // both groups keep the induced-edge order.
  std::set<std::string> center_ids(s.center_ids.begin(), s.center_ids.end());
  std::vector<const GraphEdge*> first, rest;
  for (const auto& e : s.edges) {
    (center_ids.count(e.src) || center_ids.count(e.dst) ? first : rest).push_back(&e);
  }
  std::size_t line = 0;
  for (const auto* e : first) {
    if (line++) d.connections_section += "\n";
    d.connections_section += edge_line(*e, s);
  }
  for (const auto* e : rest) {
    if (line++) d.connections_section += "\n";
    d.connections_section += edge_line(*e, s);
  }
  if (s.edges.empty()) d.connections_section = "(none)";
  return d;
}

namespace {

const char kPromptTemplate[] =
    R"(You are an advanced vision model tasked with generating detailed captions
for urban street images within a comprehensive spatial network context.

# Comprehensive Spatial Context:

## Network Structure:
{subgraph_desc}

# Enhanced Caption Generation Instructions:

You will be provided with one street image from the spatial area described
in the Network Structure above. The image is situated within a spatial
context represented by graph information.

For the image, generate a detailed caption and then summarize the image
features based on the spatial context.

1. Detailed image caption:
   Describe the unique visual features of the image, including:
   - Locations
   - Distinctive architectural features
   - Notable businesses, signage, or landmarks
   - Vegetation, greenery, water features, or natural elements
   - Visual indicators of acoustic environments (traffic, construction,
     quiet settings)
   - Elements suggesting odors (vegetation, cafes, trash bins, traffic exhaust)
   - Colors, materials, and textures influencing thermal and psychological
     perception

2. Summarization of image features within spatial context:
   Focus on visual elements that reflect spatial context, including:
   - Clues indicating the neighborhood or area
   - Street features aligned with the network (crossings, width, type)
   - Visual indicators of proximity to other locations in the network
   - Architectural or urban design elements characteristic of the region
   - Street signs, direction indicators, or landmarks situating the image
   - Overall multi-sensory quality influencing psychological wellbeing

# Output Format:

Image:
<caption>

Summarization:
<summary>

# Instructions:
- Prefix captions with "Image:"
- End with a "Summarization:" section
- Connect visual observations to spatial connectivity patterns
- Refer to locations and entities in the network description
- Consider interactions of visual, acoustic, and olfactory cues
)";

}  // namespace

const std::string& caption_prompt_template() {
  static const std::string tmpl = kPromptTemplate;
  return tmpl;
}

CaptionPrompt build_caption_prompt(const SubgraphDescription& d) {
  CaptionPrompt p;
  p.schema_version = kCaptionPromptVersion;
  p.full_text = caption_prompt_template();
  const std::string slot = "{subgraph_desc}";
  const auto pos = p.full_text.find(slot);
  p.full_text.replace(pos, slot.size(), d.full_text());
  return p;
}

}  // namespace ugraph
