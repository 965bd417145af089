#pragma once

#include <optional>
#include <variant>

#include "ugraph/encoder.hpp"

namespace ugraph {

struct SubgraphQuery {
  Subgraph subgraph;
  std::string center_id;
};

using QueryInput = std::variant<SubgraphQuery, std::string>;

// Paired queries/targets; index i of each side is the positive pair, every
// other target in the batch serves as a negative.
struct ContrastiveBatch {
  std::vector<QueryInput> queries;
  std::vector<std::string> targets;

  void validate() const;  // sizes equal, >= 2
};

// All parameter gradients, shapes mirroring EncoderParams.
struct EncoderGrads {
  EncoderParams tensors;  // gradient values stored in the same layout

  static EncoderGrads zeros_like(const EncoderParams& params);
};

// Differentiable objectives for training and gradient checking.
enum class Objective {
  InfoNCE,      // contrastive loss over the batch
  LinearProbe,  // fixed random linear functional of the embeddings
};

struct ForwardBackwardResult {
  double loss = 0.0;
  EncoderGrads grads;
  // Smallest |pre-activation| seen at any LeakyReLU input.
  double min_kink_distance = 0.0;
  // Bit-packed signs of every LeakyReLU input; a finite-difference probe
  // whose signature differs from the base point straddled a kink.
  std::vector<std::uint64_t> kink_signature;
};

ForwardBackwardResult forward_backward(const EncoderParams& params,
                                       const ContrastiveBatch& batch, Objective objective,
                                       std::uint64_t probe_seed = 7);

struct GradCheckBlockReport {
  std::string block;
  std::size_t sampled = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::size_t sampled_params = 0;
  double max_rel_error = 0.0;
  std::vector<GradCheckBlockReport> blocks;
  double min_kink_distance = 0.0;
  std::size_t kink_resamples = 0;  // probes redrawn because a sign flipped
};

// Central-difference check of the analytic gradients: samples at least
// `min_samples` scalars spanning every parameter block and reports
// |g_a - g_n| / max(|g_a|, |g_n|, 1e-8). Probes that flip the sign of any
// LeakyReLU input are discarded and redrawn, so the comparison never
// differences across a kink.
GradCheckReport grad_check(const EncoderParams& params, const ContrastiveBatch& batch,
                           double eps = 1e-4, std::size_t min_samples = 100,
                           Objective objective = Objective::InfoNCE,
                           std::uint64_t sample_seed = 1234);

struct TrainConfig {
  double learning_rate = 5e-5;  // graph-encoder blocks
  double text_lr_ratio = 0.1;   // stage 2: token-table rate = ratio * lr
  std::size_t steps = 200;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct TrainStepLog {
  std::size_t step = 0;
  double loss = 0.0;
  double lr_token_table = 0.0;
  double lr_node_proj = 0.0;
  double lr_edge_mlp = 0.0;
  double lr_gat = 0.0;
  double lr_readout = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<TrainStepLog> history;

  std::string history_csv() const;  // step,loss,lr per block group
};

// Adam training over a fixed batch sequence (step s consumes
// batches[s % batches.size()]). Stage 2 applies learning_rate to the graph
// encoder and text_lr_ratio * learning_rate to the token table; stage 1
// uses learning_rate everywhere. Deterministic given the seed; aborts with
// NumericError if the loss goes non-finite.
TrainResult train_toy(const std::vector<ContrastiveBatch>& batches, EncoderParams params,
                      const TrainConfig& cfg, int stage);

// Synthetic separable dataset: n pairs of (tiny subgraph, matching text).
std::vector<ContrastiveBatch> make_toy_dataset(std::size_t pairs, std::size_t batch_size,
                                               const EncoderConfig& cfg, std::uint64_t seed);

// Hit@1 of queries against targets under the given params.
double toy_hit_at_1(const std::vector<ContrastiveBatch>& batches, const EncoderParams& params);

// Checkpoint: JSON header (config echo + block table) followed by raw
// little-endian 64-bit floats.
void save_checkpoint(const EncoderParams& params, const std::string& path);
EncoderParams load_checkpoint(const std::string& path);

}  // namespace ugraph
