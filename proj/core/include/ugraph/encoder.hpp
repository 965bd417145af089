#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ugraph/subgraph.hpp"

namespace ugraph {

// Row-major dense matrix of 64-bit floats.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Mat&) const = default;
};

struct EncoderConfig {
  std::size_t hidden_dim = 128;   // d
  std::size_t pe_dim = 64;        // divisible by 4
  std::size_t edge_dim = 64;
  std::size_t token_dim = 64;
  std::size_t vocab_size = 65536;
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;      // divides hidden_dim
  double f_min = 1.0 / 10000.0;
  double f_max = 1.0;
  double temperature = 0.05;
  double leaky_slope = 0.2;
  bool use_layer_norm = true;     // test mode may disable
  double layer_norm_eps = 1e-5;

  std::size_t head_dim() const { return hidden_dim / num_heads; }
  std::size_t pe_frequencies() const { return pe_dim / 4; }
  void validate() const;
};

struct GatLayerParams {
  Mat w_src;     // [d x d]
  Mat w_tgt;     // [d x d]
  Mat w_edge;    // [edge_dim x d]
  Mat attn;      // [1 x d] per-head attention vectors, concatenated
  Mat w_out;     // [d x d]
  Mat ln_scale;  // [1 x d]
  Mat ln_shift;  // [1 x d]
};

struct EncoderParams {
  EncoderConfig config;
  Mat token_table;   // [vocab x token_dim]
  Mat node_proj_w;   // [(token_dim + pe_dim) x d]
  Mat node_proj_b;   // [1 x d]
  Mat edge_w1;       // [5 x edge_dim]
  Mat edge_b1;       // [1 x edge_dim]
  Mat edge_w2;       // [edge_dim x edge_dim]
  Mat edge_b2;       // [1 x edge_dim]
  std::vector<GatLayerParams> layers;
  Mat readout;       // [d x d]

  // Deterministic seeded initialization.
  static EncoderParams init(const EncoderConfig& cfg, std::uint64_t seed);

  // Named tensor views in a fixed order; shared by the optimizer, the
  // gradient checker, and the checkpoint writer.
  std::vector<std::pair<std::string, Mat*>> named_tensors();
  std::vector<std::pair<std::string, const Mat*>> named_tensors() const;
};

// Raw directed edge features: [ln(1+d), sin(theta), cos(theta), dlon, dlat].
using EdgeRawFeature = std::array<double, 5>;
inline constexpr std::size_t kEdgeRawDim = 5;

// Canonical encoder view of a subgraph: nodes sorted by id, both directions
// of every edge, plus one zero-feature self-loop per node.
struct EncodedGraph {
  std::vector<std::string> node_ids;
  std::size_t center = 0;
  std::vector<std::vector<std::uint32_t>> node_tokens;  // hashed token ids
  std::vector<GeoPoint> anchors;
  std::vector<EdgeRawFeature> edge_raw;        // directed records then self-loops
  std::vector<std::pair<int, int>> edge_ends;  // (node, neighbor) per record
  std::vector<std::vector<int>> in_records;    // per node: its attention records

  std::size_t node_count() const { return node_ids.size(); }
  std::size_t record_count() const { return edge_raw.size(); }
};

EncodedGraph build_encoded_graph(const Subgraph& s, const std::string& center_id,
                                 const EncoderConfig& cfg);

// Lowercased alphanumeric tokens hashed into [0, vocab).
std::vector<std::uint32_t> tokenize_text(const std::string& text, std::size_t vocab);
std::string node_text(const GraphNode& n);

// Multi-frequency sinusoidal positional encoding of lon/lat. Layout: for
// coord in {lon/180, lat/90}, for k in [0, K): sin, cos with geometric
// frequencies f_k = f_min * (f_max / f_min)^(k / (K - 1)).
std::vector<double> spatial_pe(const GeoPoint& p, const EncoderConfig& cfg);

// Per-node input features and projections.
Mat encode_nodes(const EncodedGraph& g, const EncoderParams& params);
// Embedded edge features, one row per record in g (self-loops included).
Mat encode_edges(const EncodedGraph& g, const EncoderParams& params);

// One message-passing layer: per head, attention logits
// a_h . LeakyReLU(W_s h_i + W_t h_j + W_e e_ij) are softmax-normalized over
// each node's records, messages aggregate W_t h_j, and the output applies
// W_o, a residual connection, and layer normalization.
Mat gatv2_layer(const Mat& H, const Mat& edge_emb, const EncodedGraph& g,
                const GatLayerParams& layer, const EncoderConfig& cfg);

// Full forward: nodes -> layers -> center row -> readout projection.
std::vector<double> graph_embedding(const Subgraph& s, const std::string& center_id,
                                    const EncoderParams& params);

// Text path: mean-pooled token embedding, zero positional slot, node_proj.
std::vector<double> text_embedding(const std::string& text, const EncoderParams& params);

// Mean InfoNCE over in-batch negatives with temperature-scaled cosine
// similarity. Throws NumericError on zero-norm embeddings.
double infonce_loss(const std::vector<std::vector<double>>& queries,
                    const std::vector<std::vector<double>>& targets, double temperature);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct InstructionTemplate {
  int stage;
  std::string variant;  // "path" | "caption" | "context"
  std::string text;
};

// The four fixed instruction templates (two per stage).
const std::vector<InstructionTemplate>& instruction_templates();

// "[IMAGE_TOKEN] Instruct: {t}" (stage 1) or
// "[GRAPH_TOKEN][IMAGE_TOKEN] Instruct: {t}" (stage 2).
std::string build_query_instruction(int stage, const std::string& variant);

}  // namespace ugraph
