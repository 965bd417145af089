#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ugraph/describe.hpp"
#include "ugraph/encoder_train.hpp"
#include "ugraph/geojson.hpp"
#include "ugraph/graph_io.hpp"
#include "ugraph/pipeline.hpp"
#include "ugraph/samples.hpp"
#include "ugraph/synth.hpp"
#include "ugraph/version.hpp"

namespace fs = std::filesystem;
using namespace ugraph;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string out_dir;
  std::size_t jobs = 1;
  bool verbose = false;
};

PipelineConfig resolve_config(const GlobalArgs& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = PipelineConfig::from_json_file(g.config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.jobs > 0) cfg.jobs = g.jobs;
  return cfg;
}

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
}

void log_verbose(const GlobalArgs& g, const std::string& msg) {
  if (g.verbose) std::cerr << "[ugraph] " << msg << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"urban spatial graph pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--config", g.config_path, "pipeline config JSON")->envname("UGRAPH_CONFIG");
  auto* seed_opt = app.add_option("--seed", g.seed, "global seed");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--jobs", g.jobs, "worker threads for per-image stages");
  app.add_flag("--verbose", g.verbose, "chatty progress on stderr");

  // build-graph
  auto* build_cmd = app.add_subcommand("build-graph", "GeoJSON -> graph container");
  std::vector<std::string> geojson_args;
  build_cmd->add_option("--geojson", geojson_args, "GeoJSON FeatureCollection files");

  // anchor-images
  auto* anchor_cmd = app.add_subcommand("anchor-images", "attach viewpoints to a graph");
  std::string graph_dir_arg, images_arg;
  anchor_cmd->add_option("--graph", graph_dir_arg, "graph container dir")->required();
  anchor_cmd->add_option("--images", images_arg, "image manifest CSV (id,lon,lat)")->required();

  // extract-subgraphs
  auto* extract_cmd = app.add_subcommand("extract-subgraphs", "per-viewpoint subgraph files");
  std::string extract_graph;
  extract_cmd->add_option("--graph", extract_graph, "graph container dir")->required();

  // gen-srp
  auto* srp_cmd = app.add_subcommand("gen-srp", "spatial reasoning paths per viewpoint");
  std::string srp_graph;
  srp_cmd->add_option("--graph", srp_graph, "graph container dir")->required();

  // gen-captions-prompts
  auto* cap_cmd = app.add_subcommand("gen-captions-prompts", "caption prompt payloads");
  std::string cap_graph;
  cap_cmd->add_option("--graph", cap_graph, "graph container dir")->required();

  // emit-samples
  auto* samples_cmd = app.add_subcommand("emit-samples", "stage-1/stage-2 training records");
  std::string samples_graph;
  samples_cmd->add_option("--graph", samples_graph, "graph container dir")->required();

  // gen-bench
  auto* bench_cmd = app.add_subcommand("gen-bench", "benchmark instances");
  std::string bench_graph, bench_out, bench_scores;
  bench_cmd->add_option("--graph", bench_graph, "graph container dir")->required();
  bench_cmd->add_option("--instances-out", bench_out, "output JSONL path");
  bench_cmd->add_option("--perception-scores", bench_scores,
                        "CSV image_id,attribute,score for perception instances");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "embedding-based Hit@5/NDCG@5");
  EvalPaths eval_paths;
  eval_cmd->add_option("--instances", eval_paths.instances_file, "instances JSONL")->required();
  eval_cmd->add_option("--query-embeddings", eval_paths.query_embeddings_file,
                       "JSONL {id, vector}")->required();
  eval_cmd->add_option("--candidate-embeddings", eval_paths.candidate_embeddings_file,
                       "JSONL {id, vector}")->required();

  // train-toy
  auto* train_cmd = app.add_subcommand("train-toy", "contrastive training on a toy dataset");
  std::size_t train_pairs = 64, train_batch = 8, train_steps = 200;
  int train_stage = 2;
  double train_lr = 5e-5;
  train_cmd->add_option("--pairs", train_pairs, "synthetic pair count");
  train_cmd->add_option("--batch-size", train_batch, "contrastive batch size");
  train_cmd->add_option("--steps", train_steps, "optimizer steps");
  train_cmd->add_option("--stage", train_stage, "1 or 2 (differentiated learning rates)");
  train_cmd->add_option("--lr", train_lr, "graph-encoder learning rate");

  // grad-check
  auto* grad_cmd = app.add_subcommand("grad-check", "finite-difference gradient verification");
  double grad_eps = 1e-4;
  std::size_t grad_samples = 100;
  grad_cmd->add_option("--eps", grad_eps, "central difference step");
  grad_cmd->add_option("--samples", grad_samples, "minimum sampled parameters");

  // full-build
  auto* full_cmd = app.add_subcommand("full-build", "end-to-end dataset build");
  std::vector<std::string> full_geojson;
  std::string full_images, full_city;
  full_cmd->add_option("--geojson", full_geojson, "GeoJSON inputs (overrides config)");
  full_cmd->add_option("--images", full_images, "image manifest CSV (overrides config)");
  full_cmd->add_option("--city", full_city, "city name");

  // gen-city (synthetic fixture data)
  auto* city_cmd = app.add_subcommand("gen-city", "synthetic grid city GeoJSON + images CSV");
  int city_rows = 6, city_cols = 6;
  std::size_t city_pois = 50, city_aois = 5, city_images = 20;
  city_cmd->add_option("--rows", city_rows, "east-west streets");
  city_cmd->add_option("--cols", city_cols, "north-south avenues");
  city_cmd->add_option("--pois", city_pois, "POI count");
  city_cmd->add_option("--aois", city_aois, "AOI count");
  city_cmd->add_option("--images", city_images, "viewpoint count");

  CLI11_PARSE(app, argc, argv);
  g.seed_set = seed_opt->count() > 0;

  try {
    PipelineConfig cfg = resolve_config(g);
    const fs::path out(cfg.out_dir.empty() ? "out" : cfg.out_dir);

    if (*build_cmd) {
      if (!geojson_args.empty()) cfg.geojson_paths = geojson_args;
      if (cfg.geojson_paths.empty()) throw ConfigError("build-graph needs --geojson input");
      std::vector<GraphNode> nodes;
      LoadReport report;
      for (const auto& p : cfg.geojson_paths) {
        auto part = load_geojson_file(p, &report);
        nodes.insert(nodes.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
      }
      log_verbose(g, "loaded " + std::to_string(nodes.size()) + " nodes, " +
                         std::to_string(report.rejections.size()) + " rejected");
      const SpatialGraph graph = build_graph(nodes, cfg.graph);
      save_graph(graph, (out / "graph").string());
      std::cout << "nodes=" << graph.node_count() << " edges=" << graph.edge_count() << "\n";
      return 0;
    }

    if (*anchor_cmd) {
      SpatialGraph graph = load_graph(graph_dir_arg);
      auto images = images_from_csv(read_file(images_arg));
      std::sort(images.begin(), images.end(),
                [](const SynthImage& a, const SynthImage& b) { return a.id < b.id; });
      for (const auto& img : images) anchor_image(graph, img.id, img.position);
      save_graph(graph, (out / "graph").string());
      std::cout << "anchored=" << images.size() << "\n";
      return 0;
    }

    auto viewpoints_of = [](const SpatialGraph& graph) {
      std::vector<std::string> out_ids;
      for (const auto& [id, n] : graph.nodes) {
        if (n.kind == NodeKind::Viewpoint) out_ids.push_back(id);
      }
      return out_ids;
    };

    if (*extract_cmd) {
      const SpatialGraph graph = load_graph(extract_graph);
      std::size_t count = 0;
      for (const auto& vp : viewpoints_of(graph)) {
        const Subgraph s = extract_subgraph(graph, vp, cfg.extract);
        write_file((out / "subgraphs" / ("subgraph_" + vp + ".json")).string(),
                   serialize_subgraph(s));
        ++count;
      }
      std::cout << "subgraphs=" << count << "\n";
      return 0;
    }

    if (*srp_cmd) {
      const SpatialGraph graph = load_graph(srp_graph);
      std::string lines;
      std::size_t count = 0;
      for (const auto& vp : viewpoints_of(graph)) {
        const auto selected = select_paths(discover_destinations(graph, vp, cfg.srp), cfg.srp);
        for (const auto& c : selected) {
          const AnnotatedPath ap = annotate_path(graph, c.path);
          lines += "{\"image_id\":\"" + vp + "\",\"hops\":" + std::to_string(ap.hops) +
                   ",\"srp\":" + nlohmann::json(render_srp(ap)).dump() + "}\n";
          ++count;
        }
      }
      write_file((out / "srps.jsonl").string(), lines);
      std::cout << "srps=" << count << "\n";
      return 0;
    }

    if (*cap_cmd) {
      const SpatialGraph graph = load_graph(cap_graph);
      std::size_t count = 0;
      for (const auto& vp : viewpoints_of(graph)) {
        const Subgraph s = extract_subgraph(graph, vp, cfg.extract);
        const CaptionPrompt prompt = build_caption_prompt(describe_subgraph(s));
        write_file((out / "prompts" / (vp + ".txt")).string(), prompt.full_text);
        ++count;
      }
      std::cout << "prompts=" << count << "\n";
      return 0;
    }

    if (*samples_cmd) {
      const SpatialGraph graph = load_graph(samples_graph);
      std::string stage1, stage2;
      for (const auto& vp : viewpoints_of(graph)) {
        const auto selected = select_paths(discover_destinations(graph, vp, cfg.srp), cfg.srp);
        std::vector<AnnotatedPath> annotated;
        for (const auto& c : selected) annotated.push_back(annotate_path(graph, c.path));
        const std::string image_ref = cfg.images_dir + "/" + vp + ".jpg";
        const std::string graph_ref = "subgraphs/subgraph_" + vp + ".json";
        for (const auto& s : emit_training_samples(graph, vp, annotated, image_ref,
                                                   std::nullopt, 1)) {
          stage1 += s.to_jsonl() + "\n";
        }
        for (const auto& s :
             emit_training_samples(graph, vp, annotated, image_ref, graph_ref, 2)) {
          stage2 += s.to_jsonl() + "\n";
        }
      }
      write_file((out / "stage1.jsonl").string(), stage1);
      write_file((out / "stage2.jsonl").string(), stage2);
      std::cout << "stage1=" << std::count(stage1.begin(), stage1.end(), '\n')
                << " stage2=" << std::count(stage2.begin(), stage2.end(), '\n') << "\n";
      return 0;
    }

    if (*bench_cmd) {
      const std::string out_file =
          bench_out.empty() ? (out / "bench_instances.jsonl").string() : bench_out;
      const std::size_t n = run_benchmark_gen(cfg, bench_graph, out_file, bench_scores);
      std::cout << "instances=" << n << "\n";
      return 0;
    }

    if (*eval_cmd) {
      eval_paths.out_json = (out / "eval_report.json").string();
      eval_paths.out_csv = (out / "eval_report.csv").string();
      const EvalReport report = run_benchmark_eval(eval_paths);
      std::cout << report.to_csv();
      return 0;
    }

    if (*train_cmd) {
      EncoderConfig ecfg;
      EncoderParams params = EncoderParams::init(ecfg, cfg.seed);
      const auto batches = make_toy_dataset(train_pairs, train_batch, ecfg, cfg.seed);
      TrainConfig tcfg;
      tcfg.learning_rate = train_lr;
      tcfg.steps = train_steps;
      tcfg.seed = cfg.seed;
      const TrainResult result = train_toy(batches, std::move(params), tcfg, train_stage);
      fs::create_directories(out);
      write_file((out / "train_log.csv").string(), result.history_csv());
      save_checkpoint(result.params, (out / "encoder.ckpt").string());
      const double hit1 = toy_hit_at_1(batches, result.params);
      std::cout << "initial_loss=" << result.history.front().loss
                << " final_loss=" << result.history.back().loss << " hit@1=" << hit1 << "\n";
      return 0;
    }

    if (*grad_cmd) {
      EncoderConfig ecfg;
      ecfg.vocab_size = 4096;  // keep the self-check quick
      EncoderParams params = EncoderParams::init(ecfg, cfg.seed);
      const auto batches = make_toy_dataset(4, 4, ecfg, cfg.seed);
      const GradCheckReport report =
          grad_check(params, batches.front(), grad_eps, grad_samples);
      std::cout << "sampled=" << report.sampled_params
                << " max_rel_error=" << report.max_rel_error
                << " kink_resamples=" << report.kink_resamples << "\n";
      for (const auto& b : report.blocks) {
        std::cout << "  " << b.block << ": samples=" << b.sampled
                  << " max_rel_error=" << b.max_rel_error << "\n";
      }
      return report.max_rel_error < 1e-4 ? 0 : 4;
    }

    if (*full_cmd) {
      if (!full_geojson.empty()) cfg.geojson_paths = full_geojson;
      if (!full_images.empty()) cfg.image_manifest_path = full_images;
      if (!full_city.empty()) cfg.city = full_city;
      if (cfg.geojson_paths.empty()) throw ConfigError("full-build needs GeoJSON inputs");
      const BuildManifest manifest = run_dataset_build(cfg);
      std::cout << "nodes=" << manifest.nodes << " edges=" << manifest.edges
                << " srps=" << manifest.srps << " stage1=" << manifest.stage1_samples
                << " stage2=" << manifest.stage2_samples << "\n";
      return 0;
    }

    if (*city_cmd) {
      SynthCityConfig scfg;
      scfg.rows = city_rows;
      scfg.cols = city_cols;
      scfg.pois = city_pois;
      scfg.aois = city_aois;
      scfg.images = city_images;
      scfg.seed = cfg.seed;
      const SynthCity city = gen_city(scfg);
      fs::create_directories(out);
      write_file((out / "city.geojson").string(), to_geojson(city.nodes));
      write_file((out / "images.csv").string(), images_to_csv(city.images));
      std::cout << "nodes=" << city.nodes.size() << " images=" << city.images.size() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
