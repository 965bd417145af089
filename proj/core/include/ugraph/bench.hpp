#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ugraph/graph.hpp"
#include "ugraph/subgraph.hpp"

namespace ugraph {

enum class BenchTask : int {
  Geolocation = 0,
  ImageRetrieval,
  Perception,
  NearestStreet,
  NearestPOI,
  Distance,
  DistanceDirection,
};

const char* bench_task_name(BenchTask t);
std::optional<BenchTask> bench_task_from_name(std::string_view name);

struct BenchmarkInstance {
  std::string id;
  BenchTask task = BenchTask::Geolocation;
  std::string city;
  std::string attribute;  // perception attribute, empty otherwise
  std::string messages;   // single user-turn content with <image>/<graph> slots
  std::vector<std::string> images;
  std::vector<std::string> graphs;
  std::vector<std::string> candidates;
  int ground_truth_idx = 0;
  std::string ground_truth;

  std::string to_jsonl() const;
  static BenchmarkInstance from_jsonl(const std::string& line);
};

struct EmbeddingRecord {
  std::string id;
  std::vector<double> vector;
};

// JSONL {"id": ..., "vector": [...]}; enforces uniform dimension and finite
// values across the file.
std::map<std::string, std::vector<double>> load_embeddings(const std::string& text);
std::string embeddings_to_jsonl(const std::vector<EmbeddingRecord>& records);

struct Ranking {
  std::vector<int> order;      // candidate indices, best first
  std::vector<double> scores;  // cosine similarity, non-increasing

  // 1-based rank of a candidate index.
  int rank_of(int candidate_idx) const;
};

// Descending cosine similarity; ties broken by ascending candidate index.
// `ids` (when given) only improves error messages.
Ranking rank_candidates(const std::vector<double>& query,
                        const std::vector<std::vector<double>>& candidates,
                        const std::vector<std::string>& ids = {});

int hit_at_k(const Ranking& r, int ground_truth_idx, int k = 5);
double ndcg_at_k(const Ranking& r, int ground_truth_idx, int k = 5);

struct EvalCell {
  double hit_at_5 = 0.0;   // percent
  double ndcg_at_5 = 0.0;  // percent
  std::size_t n_instances = 0;
};

struct EvalReport {
  // (task, city) -> metrics
  std::map<std::pair<std::string, std::string>, EvalCell> cells;

  std::string to_json() const;
  std::string to_csv() const;
};

// Pre-flight checks that every instance id has a query embedding and every
// candidate string a candidate embedding; throws DataError enumerating all
// gaps before scoring anything.
EvalReport evaluate(const std::vector<BenchmarkInstance>& instances,
                    const std::map<std::string, std::vector<double>>& query_embeddings,
                    const std::map<std::string, std::vector<double>>& candidate_embeddings);

struct PerceptionBin {
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // inclusive upper edge of the bin
  std::string adjective;
};

struct PerceptionScheme {
  std::string attribute;           // "safe", "wealthy", ...
  std::vector<PerceptionBin> bins;  // cover [0,10] without overlap

  static PerceptionScheme defaults(const std::string& attribute);
  void validate() const;
};

inline const std::vector<std::string>& perception_attributes() {
  static const std::vector<std::string> attrs = {"safe",       "wealthy", "lively",
                                                 "depressing", "boring",  "beautiful"};
  return attrs;
}

// "{adjective} {attribute}, {Attribute} Score: {score:.1f}".
std::string discretize_perception(double score, const PerceptionScheme& scheme);

struct BenchGenConfig {
  std::size_t candidate_count = 20;
  std::uint64_t seed = 1;
  std::string city = "city";
  double radius_m = 200.0;  // subgraph context radius for grounding tasks
  std::vector<double> distance_multipliers = {3,    9,    15,   24,   36,   54,  81,
                                              122,  183,  274,  412,  617,  926, 1389,
                                              2084, 3125, 4688, 7032, 10548};
};

// "on {road}, near {intersection}, close to {named POI/AOI}, in {AOI}";
// absent components are omitted.
std::string gen_geolocation_label(const SpatialGraph& g, const std::string& viewpoint);

struct GenOutcome {
  std::optional<BenchmarkInstance> instance;
  std::string skip_reason;  // set when instance is empty
};

// NearestStreet / NearestPOI / Distance / DistanceDirection instances
// anchored at a viewpoint; candidates are shuffled with a seed derived from
// (cfg.seed, instance id).
GenOutcome gen_spatial_grounding(const SpatialGraph& g, const std::string& viewpoint,
                                 BenchTask task, const BenchGenConfig& cfg);

// Geolocation: the viewpoint's label plus distractor labels of other
// viewpoints.
GenOutcome gen_geolocation_instance(const SpatialGraph& g, const std::string& viewpoint,
                                    const std::vector<std::string>& all_viewpoints,
                                    const BenchGenConfig& cfg);

// Image retrieval: textual journey query against candidate image refs.
GenOutcome gen_image_retrieval_instance(const SpatialGraph& g, const std::string& viewpoint,
                                        const std::string& destination_name,
                                        const std::vector<std::string>& image_pool,
                                        const std::string& graph_ref,
                                        const BenchGenConfig& cfg);

// Perception: the discretized true label among distractor labels drawn from
// the 0.5-step score grid.
GenOutcome gen_perception_instance(const std::string& viewpoint, const std::string& image_ref,
                                   const std::string& graph_ref, const std::string& attribute,
                                   double score, const BenchGenConfig& cfg);

}  // namespace ugraph
