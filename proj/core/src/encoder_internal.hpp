#pragma once

#include "ugraph/encoder.hpp"

namespace ugraph::detail {

// C = A * B
Mat matmul(const Mat& A, const Mat& B);
// C = A * B^T
Mat matmul_bt(const Mat& A, const Mat& B);
// C = A^T * B
Mat matmul_at(const Mat& A, const Mat& B);

struct LayerCache {
  Mat h_in;
  Mat p_src;   // h * w_src
  Mat p_tgt;   // h * w_tgt
  Mat e_eff;   // e_emb * w_edge, per record
  Mat pre;     // [records x d] p_src[i] + p_tgt[j] + e_eff[r]
  Mat z;       // LeakyReLU(pre)
  Mat alpha;   // [records x heads]
  Mat msg;     // [n x d] concatenated head messages
  Mat out_proj;  // msg * w_out
  Mat residual;  // h_in + out_proj
  std::vector<double> ln_mean, ln_inv_std;
  Mat h_out;
};

struct GraphCache {
  EncodedGraph eg;
  Mat x;       // [n x (token_dim + pe_dim)]
  Mat h0;
  Mat z1, a1;  // edge MLP pre/post hidden
  Mat e_emb;   // [records x edge_dim]
  std::vector<LayerCache> layers;
  std::vector<double> center_row;  // input to readout
  std::vector<double> embedding;
  double min_kink = 0.0;  // min |pre| over every LeakyReLU input
};

struct TextCache {
  std::vector<std::uint32_t> tokens;
  Mat x;  // [1 x (token_dim + pe_dim)]
  std::vector<double> embedding;
};

GraphCache forward_graph(const EncodedGraph& eg, const EncoderParams& params);
TextCache forward_text(const std::string& text, const EncoderParams& params);

// Node input features: [mean-pooled tokens | positional encoding].
Mat node_input_features(const EncodedGraph& eg, const EncoderParams& params);

void layer_forward(const Mat& h, const Mat& e_emb, const EncodedGraph& eg,
                   const GatLayerParams& layer, const EncoderConfig& cfg, LayerCache& cache,
                   double* min_kink);

}  // namespace ugraph::detail
