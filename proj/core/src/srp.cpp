#include "ugraph/srp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <set>

namespace ugraph {

namespace {

// Transitions shorter than this render as "0.0m" and are dropped between
// non-point connection points.
constexpr double kRenderEpsM = 0.05;

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string display_name(const GraphNode& n) {
  return sanitize_entity_name(n.name.empty() ? n.id : n.name);
}

bool crossing_continuation(const GraphNode& from, const GraphEdge& oriented) {
  return from.kind == NodeKind::Intersection && oriented.kind == EdgeKind::Crossing;
}

// Road both POIs share a Nearest edge with; names OnSameStreet relations.
std::string shared_street_name(const SpatialGraph& g, const std::string& a,
                               const std::string& b) {
  std::set<std::string> roads_a;
  for (const auto& [nid, ei] : g.neighbors(a)) {
    const GraphEdge& e = g.edges[ei];
    if (e.kind == EdgeKind::Nearest && g.nodes.at(nid).kind == NodeKind::Road)
      roads_a.insert(nid);
  }
  for (const auto& [nid, ei] : g.neighbors(b)) {
    const GraphEdge& e = g.edges[ei];
    if (e.kind == EdgeKind::Nearest && roads_a.count(nid)) {
      return display_name(g.nodes.at(nid));
    }
  }
  return edge_kind_name(EdgeKind::OnSameStreet);
}

int count_roads_at(const SpatialGraph& g, const std::string& intersection_id) {
  int roads = 0;
  for (const auto& [nid, ei] : g.neighbors(intersection_id)) {
    if (g.nodes.at(nid).kind == NodeKind::Road) ++roads;
  }
  return roads;
}

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw DataError("SRP parse error at offset " + std::to_string(pos) + ": " + why);
  }

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t' ||
                                 text[pos] == '\r'))
      ++pos;
  }

  bool eat(const std::string& s) {
    if (text.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }

  // Reads one "(...)" group and splits it on top-level commas.
  std::vector<std::string> read_group() {
    skip_ws();
    if (pos >= text.size() || text[pos] != '(') fail("expected '('");
    ++pos;
    std::vector<std::string> fields;
    std::string cur;
    while (pos < text.size() && text[pos] != ')') {
      if (text[pos] == ',') {
        fields.push_back(trim(cur));
        cur.clear();
        ++pos;
        continue;
      }
      cur += text[pos++];
    }
    if (pos >= text.size()) fail("unterminated group");
    ++pos;  // ')'
    fields.push_back(trim(cur));
    return fields;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }
};

// "2.0m" / "2.0 m" -> meters; nullopt when the field is not a distance.
std::optional<double> parse_distance_field(const std::string& field) {
  std::size_t i = 0;
  while (i < field.size() &&
         (std::isdigit(static_cast<unsigned char>(field[i])) || field[i] == '.'))
    ++i;
  if (i == 0) return std::nullopt;
  std::size_t j = i;
  while (j < field.size() && field[j] == ' ') ++j;
  if (j >= field.size() || field[j] != 'm' || j + 1 != field.size()) return std::nullopt;
  try {
    return std::stod(field.substr(0, i));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// "342°(N)" / "52°NE" / "-" -> transition bearing.
std::optional<Transition> parse_bearing_field(const std::string& field, double distance) {
  Transition t;
  t.distance_m = distance;
  if (field == "-") {
    t.bearing_deg = 0.0;
    t.has_bearing = false;
    return t;
  }
  const std::string degree = "°";
  const auto deg_pos = field.find(degree);
  if (deg_pos == std::string::npos) return std::nullopt;
  const std::string num = Parser::trim(field.substr(0, deg_pos));
  std::string rest = Parser::trim(field.substr(deg_pos + degree.size()));
  if (!rest.empty() && rest.front() == '(') {
    if (rest.back() != ')') return std::nullopt;
    rest = rest.substr(1, rest.size() - 2);
  }
  if (!cardinal_from_name(rest)) return std::nullopt;
  try {
    t.bearing_deg = std::fmod(std::stod(num), 360.0);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (t.bearing_deg < 0) t.bearing_deg += 360.0;
  t.has_bearing = true;
  return t;
}

std::optional<Transition> fields_to_transition(const std::vector<std::string>& fields) {
  if (fields.size() != 2) return std::nullopt;
  const auto distance = parse_distance_field(fields[0]);
  if (!distance) return std::nullopt;
  return parse_bearing_field(fields[1], *distance);
}

}  // namespace

PathStep PathStep::triple_step(Triple t, std::optional<Transition> trailing, GeoPoint from,
                               GeoPoint to) {
  PathStep s;
  s.kind = Kind::TripleStep;
  s.triple = std::move(t);
  s.trailing = trailing;
  s.from = from;
  s.to = to;
  return s;
}

PathStep PathStep::move_step(Transition m, GeoPoint from, GeoPoint to) {
  PathStep s;
  s.kind = Kind::MoveStep;
  s.move = m;
  s.from = from;
  s.to = to;
  return s;
}

void SrpConfig::validate() const {
  if (min_hops > max_hops) throw ConfigError("min_hops must be <= max_hops");
  if (min_hops < 1 || max_path_m <= 0 || per_hop_quota < 1) {
    throw ConfigError("SRP config values out of range");
  }
}

std::vector<PathCandidate> DestinationCandidates::all() const {
  std::vector<PathCandidate> out;
  out.reserve(polygonal.size() + linear.size() + point.size());
  out.insert(out.end(), polygonal.begin(), polygonal.end());
  out.insert(out.end(), linear.begin(), linear.end());
  out.insert(out.end(), point.begin(), point.end());
  return out;
}

std::string sanitize_entity_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (std::size_t i = 0; i < name.size(); ++i) {
    const char c = name[i];
    if (c == '(' || c == ')' || c == ',') {
      out += ' ';
    } else if (c == '-' && i + 1 < name.size() && name[i + 1] == '>') {
      out += ' ';
      ++i;
    } else {
      out += c;
    }
  }
  // Collapse runs of spaces introduced above.
  std::string collapsed;
  bool prev_space = false;
  for (char c : out) {
    if (c == ' ') {
      if (!prev_space) collapsed += c;
      prev_space = true;
    } else {
      collapsed += c;
      prev_space = false;
    }
  }
  return Parser::trim(collapsed);
}

DestinationCandidates discover_destinations(const SpatialGraph& g, const std::string& start,
                                            const SrpConfig& cfg) {
  cfg.validate();
  const GraphNode& sn = g.node(start);

  // 0/1 BFS on triple cost.
  std::map<std::string, int> hops;
  std::map<std::string, std::string> parent;
  std::deque<std::string> queue;
  hops[start] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    const std::string u = queue.front();
    queue.pop_front();
    const int hu = hops[u];
    const GraphNode& un = g.nodes.at(u);
    for (const auto& [v, ei] : g.neighbors(u)) {
      const GraphEdge oriented = g.oriented_edge(ei, u);
      const int cost = crossing_continuation(un, oriented) ? 0 : 1;
      const int hv = hu + cost;
      if (hv > cfg.max_hops) continue;
      auto it = hops.find(v);
      if (it != hops.end() && it->second <= hv) continue;
      hops[v] = hv;
      parent[v] = u;
      if (cost == 0) {
        queue.push_front(v);
      } else {
        queue.push_back(v);
      }
    }
  }

  DestinationCandidates out;
  for (const auto& [id, h] : hops) {
    if (id == start) continue;
    const GraphNode& n = g.nodes.at(id);
    PathCandidate c;
    c.destination = id;
    c.geometry_kind = n.geometry.kind;
    c.destination_kind = n.kind;
    c.destination_named = !n.name.empty();
    c.hops = h;
    c.geo_distance_m = haversine_m(sn.anchor, n.anchor);
    std::vector<std::string> rev;
    for (std::string cur = id; cur != start; cur = parent.at(cur)) rev.push_back(cur);
    rev.push_back(start);
    c.path.assign(rev.rbegin(), rev.rend());
    const AnnotatedPath ap = annotate_path(g, c.path);
    c.hops = ap.hops;
    for (const auto& s : ap.steps) {
      if (s.kind == PathStep::Kind::MoveStep) c.path_length_m += s.move.distance_m;
      else if (s.trailing) c.path_length_m += s.trailing->distance_m;
    }
    switch (c.geometry_kind) {
      case GeometryKind::Polygon: out.polygonal.push_back(std::move(c)); break;
      case GeometryKind::LineString: out.linear.push_back(std::move(c)); break;
      case GeometryKind::Point: out.point.push_back(std::move(c)); break;
    }
  }
  auto near_first = [](const PathCandidate& a, const PathCandidate& b) {
    return std::tie(a.geo_distance_m, a.destination) < std::tie(b.geo_distance_m, b.destination);
  };
  std::sort(out.polygonal.begin(), out.polygonal.end(), near_first);
  std::sort(out.linear.begin(), out.linear.end(), near_first);
  std::sort(out.point.begin(), out.point.end(), near_first);
  return out;
}

std::vector<PathCandidate> select_paths(const DestinationCandidates& candidates,
                                        const SrpConfig& cfg) {
  cfg.validate();
  std::map<int, std::vector<const PathCandidate*>> by_hops;
  const std::set<NodeKind> excluded(cfg.excluded_kinds.begin(), cfg.excluded_kinds.end());
  const auto all = candidates.all();
  for (const auto& c : all) {
    if (c.hops < cfg.min_hops || c.hops > cfg.max_hops) continue;
    if (c.path_length_m > cfg.max_path_m) continue;
    if (excluded.count(c.destination_kind)) continue;
    by_hops[c.hops].push_back(&c);
  }
  std::vector<PathCandidate> out;
  for (auto& [h, group] : by_hops) {
    std::sort(group.begin(), group.end(), [](const PathCandidate* a, const PathCandidate* b) {
      const bool a_unnamed = !a->destination_named;
      const bool b_unnamed = !b->destination_named;
      return std::tie(a->geo_distance_m, a_unnamed, a->destination) <
             std::tie(b->geo_distance_m, b_unnamed, b->destination);
    });
    const std::size_t quota = static_cast<std::size_t>(cfg.per_hop_quota);
    for (std::size_t i = 0; i < group.size() && i < quota; ++i) out.push_back(*group[i]);
  }
  return out;
}

AnnotatedPath annotate_path(const SpatialGraph& g, const std::vector<std::string>& path) {
  if (path.size() < 2) throw DataError("path needs at least two nodes");
  AnnotatedPath out;
  const GraphNode& start = g.node(path[0]);
  out.image_id = start.id;
  out.origin = start.anchor;

  GeoPoint pos = start.anchor;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const GraphNode& u = g.node(path[i]);
    const GraphNode& v = g.node(path[i + 1]);
    // Deterministic pick when several edges connect the pair: lowest index.
    std::optional<std::size_t> edge_index;
    for (const auto& [nid, ei] : g.neighbors(path[i])) {
      if (nid == path[i + 1] && (!edge_index || ei < *edge_index)) edge_index = ei;
    }
    if (!edge_index) throw DataError("path edge missing: " + path[i] + " -> " + path[i + 1]);
    const GraphEdge e = g.oriented_edge(*edge_index, path[i]);

    if (crossing_continuation(u, e)) {
      pos = e.dst_point;
      continue;
    }

    // Travel along the current entity to this edge's connection point.
    const Transition approach = transition_between(pos, e.src_point);
    if (approach.distance_m >= kRenderEpsM) {
      out.steps.push_back(PathStep::move_step(approach, pos, e.src_point));
      pos = e.src_point;
    }

    Triple t;
    t.source = i == 0 ? sanitize_entity_name(u.id) : display_name(u);
    t.target = display_name(v);
    if (e.kind == EdgeKind::Crossing && v.kind == NodeKind::Intersection) {
      t.relation = count_roads_at(g, v.id) > 2 ? "complex_crossing" : "intersection";
    } else if (e.kind == EdgeKind::OnSameStreet) {
      t.relation = shared_street_name(g, u.id, v.id);
    } else {
      t.relation = edge_kind_name(e.kind);
    }

    const Transition hop = transition_between(e.src_point, e.dst_point);
    std::optional<Transition> trailing;
    const bool point_pair = u.geometry.kind == GeometryKind::Point &&
                            v.geometry.kind == GeometryKind::Point;
    if (hop.distance_m >= kRenderEpsM || point_pair) trailing = hop;
    out.steps.push_back(PathStep::triple_step(std::move(t), trailing, e.src_point, e.dst_point));
    pos = e.dst_point;
    ++out.hops;
  }

  out.destination = display_name(g.node(path.back()));
  if (out.hops < 1) throw DataError("path produced no relational steps");
  return out;
}

std::string render_transition(const Transition& t) {
  std::string out = "(" + fmt1(t.distance_m) + "m, ";
  if (!t.has_bearing || t.distance_m < kRenderEpsM) {
    out += "-";
  } else {
    const long deg = static_cast<long>(std::llround(t.bearing_deg)) % 360;
    out += std::to_string(deg) + "°(" +
           cardinal_name(cardinal8(static_cast<double>(deg))) + ")";
  }
  out += ")";
  return out;
}

std::string render_srp(const AnnotatedPath& p) {
  std::string out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (i) out += " -> ";
    const PathStep& s = p.steps[i];
    if (s.kind == PathStep::Kind::MoveStep) {
      out += render_transition(s.move);
    } else {
      out += "(" + s.triple.source + ", ";
      if (s.triple.relation != "intersection") out += s.triple.relation + ", ";
      out += s.triple.target + ")";
      if (s.trailing) out += " " + render_transition(*s.trailing);
    }
  }
  out += ". Based on the spatial context, you can reach " + p.destination +
         " from the current image location at (" + fmt4(p.origin.lon) + ", " +
         fmt4(p.origin.lat) + ").";
  return out;
}

AnnotatedPath parse_srp(const std::string& input) {
  // Normalize unicode arrows to the canonical form.
  std::string text;
  text.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input.compare(i, 3, "→") == 0) {
      text += "->";
      i += 2;
    } else {
      text += input[i];
    }
  }

  AnnotatedPath out;
  Parser p(text);
  const std::string closing = "Based on the spatial context, you can reach ";

  bool done = false;
  while (!done) {
    const auto fields = p.read_group();
    PathStep step;
    if (auto t = fields_to_transition(fields)) {
      step = PathStep::move_step(*t, {}, {});
    } else if (fields.size() == 2 || fields.size() == 3) {
      Triple tr;
      tr.source = fields[0];
      tr.relation = fields.size() == 3 ? fields[1] : "intersection";
      tr.target = fields.back();
      if (tr.source.empty() || tr.target.empty()) p.fail("empty triple field");
      std::optional<Transition> trailing;
      p.skip_ws();
      if (p.pos < p.text.size() && p.text[p.pos] == '(') {
        const std::size_t save = p.pos;
        const auto tfields = p.read_group();
        if (auto t = fields_to_transition(tfields)) {
          trailing = *t;
        } else {
          p.pos = save;
        }
      }
      step = PathStep::triple_step(std::move(tr), trailing, {}, {});
    } else {
      p.fail("group is neither a triple nor a transition");
    }
    if (!out.steps.empty() && out.steps.back().kind == PathStep::Kind::MoveStep &&
        step.kind == PathStep::Kind::MoveStep) {
      p.fail("two consecutive transitions");
    }
    out.steps.push_back(std::move(step));

    p.skip_ws();
    if (p.eat("->")) continue;
    if (p.eat(".")) {
      p.skip_ws();
      if (!p.eat(closing)) p.fail("expected closing sentence");
      const auto from_pos = p.text.find(" from the current image location at (", p.pos);
      if (from_pos == std::string::npos) p.fail("closing sentence missing location");
      out.destination = Parser::trim(p.text.substr(p.pos, from_pos - p.pos));
      p.pos = from_pos + std::string(" from the current image location at ").size();
      const auto coords = p.read_group();
      if (coords.size() != 2) p.fail("expected (lon, lat)");
      try {
        out.origin.lon = std::stod(coords[0]);
        out.origin.lat = std::stod(coords[1]);
      } catch (const std::exception&) {
        p.fail("bad coordinates in closing sentence");
      }
      p.skip_ws();
      if (!p.eat(".")) p.fail("expected final period");
      done = true;
    } else {
      p.fail("expected ' -> ' or closing '.'");
    }
  }

  for (const auto& s : out.steps) {
    if (s.kind == PathStep::Kind::TripleStep) {
      out.image_id = s.triple.source;
      break;
    }
  }
  out.hops = 0;
  for (const auto& s : out.steps) {
    if (s.kind == PathStep::Kind::TripleStep) ++out.hops;
  }
  if (out.hops < 1) throw DataError("SRP contains no triples");
  return out;
}

}  // namespace ugraph
