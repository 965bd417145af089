#include "ugraph/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ugraph/describe.hpp"
#include "ugraph/geojson.hpp"
#include "ugraph/graph_io.hpp"
#include "ugraph/rng.hpp"
#include "ugraph/samples.hpp"
#include "ugraph/synth.hpp"
#include "ugraph/version.hpp"

namespace ugraph {

namespace fs = std::filesystem;

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
  if (!out.good()) throw DataError("write failed: " + path);
}

std::size_t count_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

// Per-image build products, merged in image order.
struct ImageOutputs {
  std::string image_id;
  std::string subgraph_json;
  std::string prompt_text;
  std::vector<std::string> srp_lines;
  std::vector<std::string> stage1_lines;
  std::vector<std::string> stage2_lines;
  std::size_t hops_total = 0;
  std::size_t paths = 0;
};

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  return from_json(read_file(path));
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("bad pipeline config: ") + e.what());
  }
  PipelineConfig cfg;
  cfg.city = j.value("city", cfg.city);
  if (j.contains("geojson_paths")) {
    for (const auto& p : j["geojson_paths"]) cfg.geojson_paths.push_back(p.get<std::string>());
  }
  cfg.image_manifest_path = j.value("image_manifest_path", cfg.image_manifest_path);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.images_dir = j.value("images_dir", cfg.images_dir);
  if (j.contains("graph")) {
    const auto& gj = j["graph"];
    cfg.graph.nearest_cutoff_m = gj.value("nearest_cutoff_m", cfg.graph.nearest_cutoff_m);
    cfg.graph.near_threshold_m = gj.value("near_threshold_m", cfg.graph.near_threshold_m);
    cfg.graph.snap_tolerance_m = gj.value("snap_tolerance_m", cfg.graph.snap_tolerance_m);
    cfg.graph.bounds_buffer_m = gj.value("bounds_buffer_m", cfg.graph.bounds_buffer_m);
    cfg.graph.cell_level = gj.value("cell_level", cfg.graph.cell_level);
  }
  if (j.contains("extract")) {
    const auto& ej = j["extract"];
    cfg.extract.radius_m = ej.value("radius_m", cfg.extract.radius_m);
    cfg.extract.max_nearby = ej.value("max_nearby", cfg.extract.max_nearby);
    cfg.extract.max_onehop = ej.value("max_onehop", cfg.extract.max_onehop);
  }
  if (j.contains("srp")) {
    const auto& sj = j["srp"];
    cfg.srp.max_hops = sj.value("max_hops", cfg.srp.max_hops);
    cfg.srp.min_hops = sj.value("min_hops", cfg.srp.min_hops);
    cfg.srp.max_path_m = sj.value("max_path_m", cfg.srp.max_path_m);
    cfg.srp.per_hop_quota = sj.value("per_hop_quota", cfg.srp.per_hop_quota);
    if (sj.contains("excluded_kinds")) {
      cfg.srp.excluded_kinds.clear();
      for (const auto& k : sj["excluded_kinds"]) {
        const auto kind = node_kind_from_name(k.get<std::string>());
        if (!kind) throw ConfigError("unknown excluded kind: " + k.get<std::string>());
        cfg.srp.excluded_kinds.push_back(*kind);
      }
    }
  }
  if (j.contains("bench")) {
    const auto& bj = j["bench"];
    cfg.bench.candidate_count = bj.value("candidate_count", cfg.bench.candidate_count);
    cfg.bench.radius_m = bj.value("radius_m", cfg.bench.radius_m);
    if (bj.contains("distance_multipliers")) {
      cfg.bench.distance_multipliers.clear();
      for (const auto& m : bj["distance_multipliers"]) {
        cfg.bench.distance_multipliers.push_back(m.get<double>());
      }
    }
  }
  return cfg;
}

std::string PipelineConfig::to_json() const {
  json j;
  j["city"] = city;
  j["geojson_paths"] = geojson_paths;
  j["image_manifest_path"] = image_manifest_path;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["images_dir"] = images_dir;
  j["graph"] = {{"nearest_cutoff_m", graph.nearest_cutoff_m},
                {"near_threshold_m", graph.near_threshold_m},
                {"snap_tolerance_m", graph.snap_tolerance_m},
                {"bounds_buffer_m", graph.bounds_buffer_m},
                {"cell_level", graph.cell_level}};
  j["extract"] = {{"radius_m", extract.radius_m},
                  {"max_nearby", extract.max_nearby},
                  {"max_onehop", extract.max_onehop}};
  json excluded = json::array();
  for (const auto& k : srp.excluded_kinds) excluded.push_back(node_kind_name(k));
  j["srp"] = {{"max_hops", srp.max_hops},
              {"min_hops", srp.min_hops},
              {"max_path_m", srp.max_path_m},
              {"per_hop_quota", srp.per_hop_quota},
              {"excluded_kinds", excluded}};
  j["bench"] = {{"candidate_count", bench.candidate_count},
                {"radius_m", bench.radius_m},
                {"distance_multipliers", bench.distance_multipliers}};
  return j.dump(2);
}

std::string BuildManifest::to_json() const {
  json j;
  j["tool_version"] = tool_version;
  j["counts"] = {{"nodes", nodes},
                 {"edges", edges},
                 {"subgraphs", subgraphs},
                 {"srps", srps},
                 {"stage1_samples", stage1_samples},
                 {"stage2_samples", stage2_samples},
                 {"caption_prompts", caption_prompts}};
  j["mean_hops"] = mean_hops;
  json files_json = json::object();
  for (const auto& [name, path] : files) files_json[name] = path;
  j["files"] = files_json;
  j["config"] = json::parse(config_echo);
  return j.dump(2) + "\n";
}

BuildManifest run_dataset_build(const PipelineConfig& cfg) {
  const fs::path out(cfg.out_dir);
  const bool out_existed = fs::exists(out);
  std::string stage = "setup";
  try {
    stage = "load";
    std::vector<GraphNode> nodes;
    LoadReport load_report;
    for (const auto& path : cfg.geojson_paths) {
      auto part = load_geojson_file(path, &load_report);
      nodes.insert(nodes.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }

    stage = "build-graph";
    SpatialGraph graph = build_graph(nodes, cfg.graph);

    stage = "anchor-images";
    std::vector<SynthImage> images;
    if (!cfg.image_manifest_path.empty()) {
      images = images_from_csv(read_file(cfg.image_manifest_path));
    }
    std::sort(images.begin(), images.end(),
              [](const SynthImage& a, const SynthImage& b) { return a.id < b.id; });
    for (const auto& img : images) {
      anchor_image(graph, img.id, img.position);
    }

    stage = "save-graph";
    fs::create_directories(out);
    save_graph(graph, (out / "graph").string());

    stage = "per-image";
    std::vector<ImageOutputs> outputs(images.size());
    parallel_for(images.size(), std::max<std::size_t>(1, cfg.jobs), [&](std::size_t i) {
      const SynthImage& img = images[i];
      ImageOutputs& o = outputs[i];
      o.image_id = img.id;

      const Subgraph sub = extract_subgraph(graph, img.id, cfg.extract);
      o.subgraph_json = serialize_subgraph(sub);
      const SubgraphDescription desc = describe_subgraph(sub);
      o.prompt_text = build_caption_prompt(desc).full_text;

      const auto candidates = discover_destinations(graph, img.id, cfg.srp);
      const auto selected = select_paths(candidates, cfg.srp);
      std::vector<AnnotatedPath> annotated;
      for (const auto& c : selected) {
        annotated.push_back(annotate_path(graph, c.path));
      }
      const std::string image_ref = cfg.images_dir + "/" + img.id + ".jpg";
      const std::string graph_ref = "subgraphs/subgraph_" + img.id + ".json";
      for (const auto& ap : annotated) {
        json srp_row;
        srp_row["image_id"] = img.id;
        srp_row["destination"] = ap.destination;
        srp_row["hops"] = ap.hops;
        srp_row["srp"] = render_srp(ap);
        o.srp_lines.push_back(srp_row.dump());
        o.hops_total += static_cast<std::size_t>(ap.hops);
        o.paths++;
      }
      for (const auto& s :
           emit_training_samples(graph, img.id, annotated, image_ref, std::nullopt, 1)) {
        o.stage1_lines.push_back(s.to_jsonl());
      }
      for (const auto& s :
           emit_training_samples(graph, img.id, annotated, image_ref, graph_ref, 2)) {
        o.stage2_lines.push_back(s.to_jsonl());
      }
    });

    stage = "write-outputs";
    std::string srps, stage1, stage2;
    std::size_t hops_total = 0, paths_total = 0;
    for (const auto& o : outputs) {
      write_file((out / "subgraphs" / ("subgraph_" + o.image_id + ".json")).string(),
                 o.subgraph_json);
      write_file((out / "prompts" / (o.image_id + ".txt")).string(), o.prompt_text);
      for (const auto& l : o.srp_lines) srps += l + "\n";
      for (const auto& l : o.stage1_lines) stage1 += l + "\n";
      for (const auto& l : o.stage2_lines) stage2 += l + "\n";
      hops_total += o.hops_total;
      paths_total += o.paths;
    }
    write_file((out / "srps.jsonl").string(), srps);
    write_file((out / "stage1.jsonl").string(), stage1);
    write_file((out / "stage2.jsonl").string(), stage2);

    stage = "manifest";
    BuildManifest manifest;
    manifest.tool_version = kVersion;
    manifest.nodes = graph.node_count();
    manifest.edges = graph.edge_count();
    manifest.subgraphs = outputs.size();
    manifest.srps = count_lines((out / "srps.jsonl").string());
    manifest.stage1_samples = count_lines((out / "stage1.jsonl").string());
    manifest.stage2_samples = count_lines((out / "stage2.jsonl").string());
    manifest.caption_prompts = outputs.size();
    manifest.mean_hops =
        paths_total == 0 ? 0.0
                         : static_cast<double>(hops_total) / static_cast<double>(paths_total);
    manifest.files = {{"graph", "graph"},
                      {"subgraphs", "subgraphs"},
                      {"prompts", "prompts"},
                      {"srps", "srps.jsonl"},
                      {"stage1", "stage1.jsonl"},
                      {"stage2", "stage2.jsonl"}};
    manifest.config_echo = cfg.to_json();
    write_file((out / "manifest.json").string(), manifest.to_json());
    return manifest;
  } catch (const std::exception& e) {
    // Partial trees are a reproducibility hazard: remove what this run
    // created, then surface the failing stage.
    std::error_code ec;
    if (!out_existed) {
      fs::remove_all(out, ec);
    } else {
      for (const char* piece : {"graph", "subgraphs", "prompts", "srps.jsonl", "stage1.jsonl",
                                "stage2.jsonl", "manifest.json"}) {
        fs::remove_all(out / piece, ec);
      }
    }
    throw DataError("dataset build failed at stage '" + stage + "': " + e.what());
  }
}

std::size_t run_benchmark_gen(const PipelineConfig& cfg, const std::string& graph_dir,
                              const std::string& out_file,
                              const std::string& perception_scores_csv) {
  SpatialGraph graph = load_graph(graph_dir);
  BenchGenConfig bench = cfg.bench;
  bench.seed = cfg.seed;
  bench.city = cfg.city;

  std::vector<std::string> viewpoints;
  for (const auto& [id, n] : graph.nodes) {
    if (n.kind == NodeKind::Viewpoint) viewpoints.push_back(id);
  }

  std::string lines;
  std::size_t count = 0;
  auto emit = [&](const GenOutcome& outcome) {
    if (outcome.instance) {
      lines += outcome.instance->to_jsonl() + "\n";
      ++count;
    }
  };

  for (const auto& vp : viewpoints) {
    emit(gen_geolocation_instance(graph, vp, viewpoints, bench));
    for (BenchTask task : {BenchTask::NearestStreet, BenchTask::NearestPOI, BenchTask::Distance,
                           BenchTask::DistanceDirection}) {
      emit(gen_spatial_grounding(graph, vp, task, bench));
    }
    // Retrieval query targets the nearest named POI.
    const GraphNode& node = graph.node(vp);
    std::string dest;
    double best = 0.0;
    for (const auto& [id, n] : graph.nodes) {
      if (n.kind != NodeKind::POI || n.name.empty()) continue;
      const double d = haversine_m(node.anchor, n.anchor);
      if (dest.empty() || d < best) {
        dest = n.name;
        best = d;
      }
    }
    if (!dest.empty()) {
      emit(gen_image_retrieval_instance(graph, vp, dest, viewpoints,
                                        "subgraphs/subgraph_" + vp + ".json", bench));
    }
  }

  if (!perception_scores_csv.empty()) {
    std::istringstream in(read_file(perception_scores_csv));
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (header && line.rfind("image_id", 0) == 0) {
        header = false;
        continue;
      }
      header = false;
      std::istringstream row(line);
      std::string id, attribute, score_text;
      if (!std::getline(row, id, ',') || !std::getline(row, attribute, ',') ||
          !std::getline(row, score_text)) {
        throw DataError("bad perception score row: " + line);
      }
      emit(gen_perception_instance(id, cfg.images_dir + "/" + id + ".jpg",
                                   "subgraphs/subgraph_" + id + ".json", attribute,
                                   std::stod(score_text), bench));
    }
  }

  write_file(out_file, lines);
  return count;
}

EvalReport run_benchmark_eval(const EvalPaths& paths) {
  std::vector<BenchmarkInstance> instances;
  {
    std::istringstream in(read_file(paths.instances_file));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) instances.push_back(BenchmarkInstance::from_jsonl(line));
    }
  }
  const auto query_embeddings = load_embeddings(read_file(paths.query_embeddings_file));
  const auto candidate_embeddings = load_embeddings(read_file(paths.candidate_embeddings_file));
  const EvalReport report = evaluate(instances, query_embeddings, candidate_embeddings);
  if (!paths.out_json.empty()) write_file(paths.out_json, report.to_json());
  if (!paths.out_csv.empty()) write_file(paths.out_csv, report.to_csv());
  return report;
}

}  // namespace ugraph
