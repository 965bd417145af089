#include "ugraph/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ugraph/rng.hpp"

namespace ugraph {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Order-independent fixed-precision accumulation.
double pairwise_sum(const std::vector<double>& values, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 4) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(values, lo, mid) + pairwise_sum(values, mid, hi);
}

double pairwise_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values, 0, values.size()) / static_cast<double>(values.size());
}

std::string capitalized(std::string word) {
  if (!word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

const char* cardinal_word(Cardinal c) {
  static constexpr const char* kWords[8] = {"north", "northeast", "east", "southeast",
                                            "south", "southwest", "west", "northwest"};
  return kWords[static_cast<int>(c)];
}

std::string display_name(const GraphNode& n) { return n.name.empty() ? n.id : n.name; }

struct NearNode {
  double distance = 0.0;
  const GraphNode* node = nullptr;
};

// All nodes of a kind sorted by exact distance from the viewpoint anchor
// (point-to-geometry for roads/AOIs).
std::vector<NearNode> nodes_by_distance(const SpatialGraph& g, const GeoPoint& from,
                                        NodeKind kind) {
  std::vector<NearNode> out;
  for (const auto& [id, n] : g.nodes) {
    if (n.kind != kind) continue;
    double d;
    if (n.geometry.kind == GeometryKind::Point) {
      d = haversine_m(from, n.anchor);
    } else {
      d = point_to_geometry_m(from, n.geometry).distance_m;
    }
    out.push_back({d, &n});
  }
  std::sort(out.begin(), out.end(), [](const NearNode& a, const NearNode& b) {
    return std::tie(a.distance, a.node->id) < std::tie(b.distance, b.node->id);
  });
  return out;
}

Rng instance_rng(const BenchGenConfig& cfg, const std::string& instance_id) {
  return Rng(cfg.seed ^ fnv1a64(instance_id));
}

// Places ground truth among distractors with a seeded shuffle.
void shuffle_candidates(BenchmarkInstance& inst, std::vector<std::string> distractors,
                        const std::string& truth, const BenchGenConfig& cfg) {
  std::vector<std::string> all = std::move(distractors);
  all.push_back(truth);
  Rng rng = instance_rng(cfg, inst.id);
  rng.shuffle(all);
  inst.candidates = std::move(all);
  const auto it = std::find(inst.candidates.begin(), inst.candidates.end(), truth);
  inst.ground_truth_idx = static_cast<int>(it - inst.candidates.begin());
  inst.ground_truth = truth;
}

}  // namespace

const char* bench_task_name(BenchTask t) {
  switch (t) {
    case BenchTask::Geolocation: return "geolocation";
    case BenchTask::ImageRetrieval: return "image_retrieval";
    case BenchTask::Perception: return "perception";
    case BenchTask::NearestStreet: return "nearest_street";
    case BenchTask::NearestPOI: return "nearest_poi";
    case BenchTask::Distance: return "distance";
    case BenchTask::DistanceDirection: return "distance_direction";
  }
  return "?";
}

std::optional<BenchTask> bench_task_from_name(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(BenchTask::DistanceDirection); ++i) {
    if (name == bench_task_name(static_cast<BenchTask>(i))) return static_cast<BenchTask>(i);
  }
  return std::nullopt;
}

std::string BenchmarkInstance::to_jsonl() const {
  json j;
  j["id"] = id;
  j["task"] = bench_task_name(task);
  j["city"] = city;
  if (!attribute.empty()) j["attribute"] = attribute;
  j["messages"] = json::array({{{"role", "user"}, {"content", messages}}});
  j["images"] = images;
  j["graphs"] = graphs;
  j["candidates"] = candidates;
  j["ground_truth_idx"] = ground_truth_idx;
  j["ground_truth"] = ground_truth;
  return j.dump();
}

BenchmarkInstance BenchmarkInstance::from_jsonl(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("bad benchmark instance: ") + e.what());
  }
  BenchmarkInstance inst;
  inst.id = j.at("id").get<std::string>();
  const auto task = bench_task_from_name(j.at("task").get<std::string>());
  if (!task) throw DataError("unknown task in instance " + inst.id);
  inst.task = *task;
  inst.city = j.at("city").get<std::string>();
  inst.attribute = j.value("attribute", "");
  const auto& msgs = j.at("messages");
  if (!msgs.is_array() || msgs.empty()) throw DataError("instance has no messages");
  inst.messages = msgs[0].at("content").get<std::string>();
  for (const auto& v : j.at("images")) inst.images.push_back(v.get<std::string>());
  for (const auto& v : j.at("graphs")) inst.graphs.push_back(v.get<std::string>());
  for (const auto& v : j.at("candidates")) inst.candidates.push_back(v.get<std::string>());
  inst.ground_truth_idx = j.at("ground_truth_idx").get<int>();
  inst.ground_truth = j.at("ground_truth").get<std::string>();
  if (inst.ground_truth_idx < 0 ||
      inst.ground_truth_idx >= static_cast<int>(inst.candidates.size())) {
    throw DataError("ground_truth_idx out of range in instance " + inst.id);
  }
  return inst;
}

std::map<std::string, std::vector<double>> load_embeddings(const std::string& text) {
  std::map<std::string, std::vector<double>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t dim = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("embedding line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string id = j.at("id").get<std::string>();
    std::vector<double> v;
    for (const auto& x : j.at("vector")) {
      const double value = x.get<double>();
      if (!std::isfinite(value)) {
        throw DataError("non-finite embedding value for id " + id);
      }
      v.push_back(value);
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim || v.empty()) {
      throw DataError("embedding dimension mismatch for id " + id);
    }
    out[id] = std::move(v);
  }
  return out;
}

std::string embeddings_to_jsonl(const std::vector<EmbeddingRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["vector"] = r.vector;
    out += j.dump();
    out += '\n';
  }
  return out;
}

int Ranking::rank_of(int candidate_idx) const {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == candidate_idx) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(order.size()) + 1;
}

Ranking rank_candidates(const std::vector<double>& query,
                        const std::vector<std::vector<double>>& candidates,
                        const std::vector<std::string>& ids) {
  auto id_of = [&](std::size_t i) {
    return i < ids.size() ? ids[i] : ("candidate#" + std::to_string(i));
  };
  double qn = 0.0;
  for (double v : query) qn += v * v;
  if (qn == 0.0) throw DataError("zero-norm query embedding");
  qn = std::sqrt(qn);

  Ranking r;
  std::vector<double> scores(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.size() != query.size()) {
      throw DataError("embedding dimension mismatch for " + id_of(i));
    }
    double dot = 0.0, cn = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      dot += query[k] * c[k];
      cn += c[k] * c[k];
    }
    if (cn == 0.0) throw DataError("zero-norm embedding for " + id_of(i));
    scores[i] = dot / (qn * std::sqrt(cn));
  }
  r.order.resize(candidates.size());
  for (std::size_t i = 0; i < r.order.size(); ++i) r.order[i] = static_cast<int>(i);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  r.scores.reserve(r.order.size());
  for (int idx : r.order) r.scores.push_back(scores[idx]);
  return r;
}

int hit_at_k(const Ranking& r, int ground_truth_idx, int k) {
  return r.rank_of(ground_truth_idx) <= k ? 1 : 0;
}

double ndcg_at_k(const Ranking& r, int ground_truth_idx, int k) {
  const int rank = r.rank_of(ground_truth_idx);
  if (rank > k) return 0.0;
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

std::string EvalReport::to_json() const {
  json rows = json::array();
  for (const auto& [key, cell] : cells) {
    rows.push_back({{"task", key.first},
                    {"city", key.second},
                    {"hit_at_5", cell.hit_at_5},
                    {"ndcg_at_5", cell.ndcg_at_5},
                    {"n_instances", cell.n_instances}});
  }
  json j;
  j["report"] = rows;
  return j.dump(2) + "\n";
}

std::string EvalReport::to_csv() const {
  std::string out = "task,city,hit_at_5,ndcg_at_5,n_instances\n";
  for (const auto& [key, cell] : cells) {
    out += key.first + "," + key.second + "," + fmt("%.4f", cell.hit_at_5) + "," +
           fmt("%.4f", cell.ndcg_at_5) + "," + std::to_string(cell.n_instances) + "\n";
  }
  return out;
}

EvalReport evaluate(const std::vector<BenchmarkInstance>& instances,
                    const std::map<std::string, std::vector<double>>& query_embeddings,
                    const std::map<std::string, std::vector<double>>& candidate_embeddings) {
  // Pre-flight: every id must resolve before any scoring happens.
  std::vector<std::string> missing;
  for (const auto& inst : instances) {
    if (!query_embeddings.count(inst.id)) missing.push_back("query:" + inst.id);
    for (const auto& c : inst.candidates) {
      if (!candidate_embeddings.count(c)) missing.push_back("candidate:" + c);
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "missing embeddings (" + std::to_string(missing.size()) + "):";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }

  std::map<std::pair<std::string, std::string>, std::vector<double>> hits, ndcgs;
  for (const auto& inst : instances) {
    const auto& q = query_embeddings.at(inst.id);
    std::vector<std::vector<double>> cands;
    cands.reserve(inst.candidates.size());
    std::vector<std::string> ids;
    for (const auto& c : inst.candidates) {
      cands.push_back(candidate_embeddings.at(c));
      ids.push_back(c);
    }
    const Ranking r = rank_candidates(q, cands, ids);
    const auto key = std::make_pair(std::string(bench_task_name(inst.task)), inst.city);
    hits[key].push_back(static_cast<double>(hit_at_k(r, inst.ground_truth_idx)));
    ndcgs[key].push_back(ndcg_at_k(r, inst.ground_truth_idx));
  }

  EvalReport report;
  for (const auto& [key, values] : hits) {
    EvalCell cell;
    cell.hit_at_5 = pairwise_mean(values) * 100.0;
    cell.ndcg_at_5 = pairwise_mean(ndcgs.at(key)) * 100.0;
    cell.n_instances = values.size();
    report.cells[key] = cell;
  }
  return report;
}

PerceptionScheme PerceptionScheme::defaults(const std::string& attribute) {
  PerceptionScheme s;
  s.attribute = attribute;
  s.bins = {{0.0, 2.5, "Not"},
            {2.5, 5.0, "Less"},
            {5.0, 7.5, "Moderately"},
            {7.5, 10.0, "Very"}};
  return s;
}

void PerceptionScheme::validate() const {
  if (bins.empty()) throw ConfigError("perception scheme has no bins");
  double cursor = 0.0;
  for (const auto& b : bins) {
    if (b.lo != cursor || b.hi <= b.lo) {
      throw ConfigError("perception bins must cover [0,10] without overlap");
    }
    cursor = b.hi;
  }
  if (cursor != 10.0) throw ConfigError("perception bins must end at 10");
}

std::string discretize_perception(double score, const PerceptionScheme& scheme) {
  scheme.validate();
  if (!std::isfinite(score) || score < 0.0 || score > 10.0) {
    throw DataError("perception score out of [0,10]: " + std::to_string(score));
  }
  // Bin edges are inclusive on the upper side; bin 0 also owns its lower
  // edge, so every score lands in exactly one bin.
  const PerceptionBin* chosen = &scheme.bins.front();
  for (const auto& b : scheme.bins) {
    if (score > b.lo && score <= b.hi) {
      chosen = &b;
      break;
    }
  }
  return chosen->adjective + " " + scheme.attribute + ", " + capitalized(scheme.attribute) +
         " Score: " + fmt("%.1f", score);
}

std::string gen_geolocation_label(const SpatialGraph& g, const std::string& viewpoint) {
  const GraphNode& vp = g.node(viewpoint);
  if (vp.kind != NodeKind::Viewpoint) throw DataError("not a viewpoint: " + viewpoint);

  std::string label;
  const auto roads = nodes_by_distance(g, vp.anchor, NodeKind::Road);
  if (!roads.empty()) label += "on " + display_name(*roads.front().node);

  const auto intersections = nodes_by_distance(g, vp.anchor, NodeKind::Intersection);
  if (!intersections.empty()) {
    if (!label.empty()) label += ", ";
    label += "near " + display_name(*intersections.front().node);
  }

  // Closest named POI or AOI.
  const GraphNode* poi = nullptr;
  double poi_d = 0.0;
  for (NodeKind kind : {NodeKind::POI, NodeKind::AOI}) {
    for (const auto& nn : nodes_by_distance(g, vp.anchor, kind)) {
      if (nn.node->name.empty()) continue;
      if (!poi || nn.distance < poi_d) {
        poi = nn.node;
        poi_d = nn.distance;
      }
      break;
    }
  }
  if (poi) {
    if (!label.empty()) label += ", ";
    label += "close to " + poi->name;
  }

  // Containing AOI, else the nearest one.
  const GraphNode* aoi = nullptr;
  for (const auto& nn : nodes_by_distance(g, vp.anchor, NodeKind::AOI)) {
    if (polygon_contains(nn.node->geometry, vp.anchor)) {
      aoi = nn.node;
      break;
    }
    if (!aoi) aoi = nn.node;
  }
  if (aoi) {
    if (!label.empty()) label += ", ";
    label += "in " + display_name(*aoi);
  }
  return label;
}

GenOutcome gen_geolocation_instance(const SpatialGraph& g, const std::string& viewpoint,
                                    const std::vector<std::string>& all_viewpoints,
                                    const BenchGenConfig& cfg) {
  GenOutcome out;
  const std::string truth = gen_geolocation_label(g, viewpoint);
  if (truth.empty()) {
    out.skip_reason = "no label components for " + viewpoint;
    return out;
  }
  std::set<std::string> labels;
  std::vector<std::string> distractors;
  for (const auto& other : all_viewpoints) {
    if (other == viewpoint) continue;
    const std::string l = gen_geolocation_label(g, other);
    if (l.empty() || l == truth || !labels.insert(l).second) continue;
    distractors.push_back(l);
  }
  if (distractors.size() + 1 < cfg.candidate_count) {
    out.skip_reason = "only " + std::to_string(distractors.size() + 1) +
                      " distinct labels for " + std::to_string(cfg.candidate_count) +
                      " candidates";
    return out;
  }
  distractors.resize(cfg.candidate_count - 1);

  BenchmarkInstance inst;
  inst.task = BenchTask::Geolocation;
  inst.city = cfg.city;
  inst.id = std::string(bench_task_name(inst.task)) + "_" + viewpoint;
  inst.messages = "<image> Where is this street view image taken? Select the correct location:";
  inst.images = {viewpoint};
  shuffle_candidates(inst, std::move(distractors), truth, cfg);
  out.instance = std::move(inst);
  return out;
}

GenOutcome gen_image_retrieval_instance(const SpatialGraph& g, const std::string& viewpoint,
                                        const std::string& destination_name,
                                        const std::vector<std::string>& image_pool,
                                        const std::string& graph_ref,
                                        const BenchGenConfig& cfg) {
  GenOutcome out;
  if (!g.has_node(viewpoint)) {
    out.skip_reason = "unknown viewpoint " + viewpoint;
    return out;
  }
  std::vector<std::string> distractors;
  for (const auto& img : image_pool) {
    if (img != viewpoint) distractors.push_back(img);
  }
  if (distractors.size() + 1 < cfg.candidate_count) {
    out.skip_reason = "image pool too small";
    return out;
  }
  Rng rng = instance_rng(cfg, "pool_" + viewpoint);
  rng.shuffle(distractors);
  distractors.resize(cfg.candidate_count - 1);

  BenchmarkInstance inst;
  inst.task = BenchTask::ImageRetrieval;
  inst.city = cfg.city;
  inst.id = std::string(bench_task_name(inst.task)) + "_" + viewpoint;
  inst.messages = "<graph> Which street view image references a journey ending at " +
                  destination_name + "?";
  inst.graphs = {graph_ref};
  shuffle_candidates(inst, std::move(distractors), viewpoint, cfg);
  out.instance = std::move(inst);
  return out;
}

GenOutcome gen_perception_instance(const std::string& viewpoint, const std::string& image_ref,
                                   const std::string& graph_ref, const std::string& attribute,
                                   double score, const BenchGenConfig& cfg) {
  GenOutcome out;
  const PerceptionScheme scheme = PerceptionScheme::defaults(attribute);
  const std::string truth = discretize_perception(score, scheme);

  // Distractor labels from the 0.5-step score grid, excluding the truth.
  std::vector<double> grid;
  for (double s = 0.0; s <= 10.0 + 1e-9; s += 0.5) grid.push_back(s);
  std::vector<std::string> pool;
  for (double s : grid) {
    const std::string label = discretize_perception(s, scheme);
    if (label != truth) pool.push_back(label);
  }
  if (pool.size() + 1 < cfg.candidate_count) {
    out.skip_reason = "score grid smaller than candidate count";
    return out;
  }
  BenchmarkInstance inst;
  inst.task = BenchTask::Perception;
  inst.city = cfg.city;
  inst.attribute = attribute;
  inst.id = std::string(bench_task_name(inst.task)) + "_" + attribute + "_" + viewpoint;
  inst.messages =
      "<graph><image> What is the perception of " + attribute + " for this urban location?";
  inst.images = {image_ref};
  if (!graph_ref.empty()) inst.graphs = {graph_ref};
  Rng rng = instance_rng(cfg, "pool_" + inst.id);
  rng.shuffle(pool);
  pool.resize(cfg.candidate_count - 1);
  shuffle_candidates(inst, std::move(pool), truth, cfg);
  out.instance = std::move(inst);
  return out;
}

GenOutcome gen_spatial_grounding(const SpatialGraph& g, const std::string& viewpoint,
                                 BenchTask task, const BenchGenConfig& cfg) {
  GenOutcome out;
  const GraphNode& vp = g.node(viewpoint);
  if (vp.kind != NodeKind::Viewpoint) {
    out.skip_reason = "not a viewpoint: " + viewpoint;
    return out;
  }

  BenchmarkInstance inst;
  inst.task = task;
  inst.city = cfg.city;
  inst.id = std::string(bench_task_name(task)) + "_" + viewpoint;
  inst.images = {viewpoint};

  switch (task) {
    case BenchTask::NearestStreet:
    case BenchTask::NearestPOI: {
      const NodeKind kind = task == BenchTask::NearestStreet ? NodeKind::Road : NodeKind::POI;
      std::vector<std::string> names;
      std::set<std::string> seen;
      for (const auto& nn : nodes_by_distance(g, vp.anchor, kind)) {
        const std::string name = display_name(*nn.node);
        if (seen.insert(name).second) names.push_back(name);
      }
      if (names.size() < cfg.candidate_count) {
        out.skip_reason = "only " + std::to_string(names.size()) + " distinct " +
                          node_kind_name(kind) + " names";
        return out;
      }
      const std::string truth = names.front();
      std::vector<std::string> distractors(names.begin() + 1,
                                           names.begin() + static_cast<long>(cfg.candidate_count));
      inst.messages = task == BenchTask::NearestStreet
                          ? "<graph><image> Using the provided spatial graph, what street is "
                            "this location on or nearest to?"
                          : "<graph><image> Using the provided spatial graph, which POI is "
                            "nearest to the current image location?";
      shuffle_candidates(inst, std::move(distractors), truth, cfg);
      break;
    }
    case BenchTask::Distance: {
      // Nearest POI of one category vs the closest POI of another.
      const auto pois = nodes_by_distance(g, vp.anchor, NodeKind::POI);
      const GraphNode* a = nullptr;
      const GraphNode* b = nullptr;
      for (const auto& nn : pois) {
        if (nn.node->category.empty()) continue;
        if (!a) {
          a = nn.node;
        } else if (nn.node->category != a->category) {
          b = nn.node;
          break;
        }
      }
      if (!a || !b) {
        out.skip_reason = "need POIs of two categories";
        return out;
      }
      const double true_m = haversine_m(a->anchor, b->anchor);
      if (true_m < 1.0) {
        out.skip_reason = "degenerate zero distance";
        return out;
      }
      if (cfg.distance_multipliers.size() + 1 < cfg.candidate_count) {
        out.skip_reason = "not enough distance multipliers";
        return out;
      }
      const std::string truth = std::to_string(static_cast<long>(std::llround(true_m))) +
                                " meters";
      std::vector<std::string> distractors;
      for (std::size_t i = 0; i + 1 < cfg.candidate_count; ++i) {
        const double v = true_m * cfg.distance_multipliers[i];
        distractors.push_back(std::to_string(static_cast<long>(std::llround(v))) + " meters");
      }
      inst.messages = "<graph><image> How far is the nearest " + a->category +
                      " from the closest " + b->category + "?";
      shuffle_candidates(inst, std::move(distractors), truth, cfg);
      break;
    }
    case BenchTask::DistanceDirection: {
      // Walk toward the nearest named entity, then ask what sits there.
      std::vector<NearNode> named;
      for (NodeKind kind : {NodeKind::POI, NodeKind::AOI, NodeKind::TransitFacility}) {
        for (const auto& nn : nodes_by_distance(g, vp.anchor, kind)) {
          if (!nn.node->name.empty() && nn.distance > 5.0 && nn.distance <= cfg.radius_m) {
            named.push_back(nn);
          }
        }
      }
      std::sort(named.begin(), named.end(), [](const NearNode& x, const NearNode& y) {
        return std::tie(x.distance, x.node->id) < std::tie(y.distance, y.node->id);
      });
      if (named.size() < cfg.candidate_count) {
        out.skip_reason = "only " + std::to_string(named.size()) + " named entities in range";
        return out;
      }
      const GraphNode* target = named.front().node;
      const double walk_m =
          std::max(10.0, 10.0 * std::llround(haversine_m(vp.anchor, target->anchor) / 10.0));
      const Cardinal dir = cardinal8(initial_bearing_deg(vp.anchor, target->anchor));
      // Ground truth re-derived from the displaced point.
      const GeoPoint displaced = destination_point(
          vp.anchor, walk_m, 45.0 * static_cast<double>(static_cast<int>(dir)));
      const GraphNode* truth_node = nullptr;
      double best = 0.0;
      for (const auto& nn : named) {
        const double d = haversine_m(displaced, nn.node->anchor);
        if (!truth_node || d < best) {
          truth_node = nn.node;
          best = d;
        }
      }
      const std::string truth = truth_node->name;
      std::vector<std::string> distractors;
      std::set<std::string> seen{truth};
      for (const auto& nn : named) {
        if (distractors.size() + 1 >= cfg.candidate_count) break;
        if (seen.insert(nn.node->name).second) distractors.push_back(nn.node->name);
      }
      if (distractors.size() + 1 < cfg.candidate_count) {
        out.skip_reason = "not enough distinct entity names";
        return out;
      }
      inst.messages = "<graph><image> Refer to the spatial graph, if you walk approximately " +
                      std::to_string(static_cast<long>(walk_m)) + " meters " +
                      cardinal_word(dir) + " from here, what landmark will you encounter?";
      shuffle_candidates(inst, std::move(distractors), truth, cfg);
      break;
    }
    default:
      out.skip_reason = "task not generated by gen_spatial_grounding";
      return out;
  }
  out.instance = std::move(inst);
  return out;
}

}  // namespace ugraph
