#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ugraph/bench.hpp"
#include "ugraph/graph.hpp"
#include "ugraph/srp.hpp"
#include "ugraph/subgraph.hpp"

namespace ugraph {

struct PipelineConfig {
  std::string city = "city";
  std::vector<std::string> geojson_paths;
  std::string image_manifest_path;  // CSV id,lon,lat
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string images_dir = "images";  // prefix recorded in sample refs

  GraphBuildConfig graph;
  ExtractConfig extract;
  SrpConfig srp;
  BenchGenConfig bench;

  // Parses a JSON config file; absent fields keep their defaults.
  static PipelineConfig from_json_file(const std::string& path);
  static PipelineConfig from_json(const std::string& text);
  std::string to_json() const;  // config echo
};

struct BuildManifest {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t subgraphs = 0;
  std::size_t srps = 0;
  std::size_t stage1_samples = 0;
  std::size_t stage2_samples = 0;
  std::size_t caption_prompts = 0;
  double mean_hops = 0.0;
  std::map<std::string, std::string> files;  // logical name -> path
  std::string config_echo;
  std::string tool_version;

  std::string to_json() const;
};

// Full dataset build: load GeoJSON, derive the graph, anchor images, then
// per image extract/describe/caption and generate SRPs plus stage-1/stage-2
// records. Any failure removes everything the run created and rethrows
// with the stage name. Deterministic given (inputs, config, seed).
BuildManifest run_dataset_build(const PipelineConfig& cfg);

// Benchmark instance generation over the anchored viewpoints of a built
// graph. perception_scores: optional CSV path (image_id,attribute,score).
std::size_t run_benchmark_gen(const PipelineConfig& cfg, const std::string& graph_dir,
                              const std::string& out_file,
                              const std::string& perception_scores_csv = "");

struct EvalPaths {
  std::string instances_file;
  std::string query_embeddings_file;
  std::string candidate_embeddings_file;
  std::string out_json;
  std::string out_csv;
};

// Pre-flight id check, evaluation, and report writing (JSON + CSV).
EvalReport run_benchmark_eval(const EvalPaths& paths);

}  // namespace ugraph
