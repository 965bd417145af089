#include "ugraph/encoder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "encoder_internal.hpp"
#include "ugraph/rng.hpp"

namespace ugraph {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double leaky(double x, double slope) { return x >= 0.0 ? x : slope * x; }

}  // namespace

void EncoderConfig::validate() const {
  if (pe_dim % 4 != 0) throw ConfigError("pe_dim must be divisible by 4");
  if (hidden_dim % num_heads != 0) throw ConfigError("hidden_dim must divide by num_heads");
  if (hidden_dim == 0 || edge_dim == 0 || token_dim == 0 || vocab_size == 0 ||
      num_layers == 0 || num_heads == 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  if (temperature <= 0) throw ConfigError("temperature must be > 0");
  if (f_min <= 0 || f_max < f_min) throw ConfigError("need 0 < f_min <= f_max");
}

namespace {

Mat xavier(std::size_t rows, std::size_t cols, Rng& rng, double gain = 1.0) {
  Mat m(rows, cols);
  const double a = gain * std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (auto& v : m.data) v = rng.uniform(-a, a);
  return m;
}

Mat gaussian(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
  Mat m(rows, cols);
  for (auto& v : m.data) v = scale * rng.next_gaussian();
  return m;
}

}  // namespace

EncoderParams EncoderParams::init(const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  EncoderParams p;
  p.config = cfg;
  p.token_table = gaussian(cfg.vocab_size, cfg.token_dim, rng, 0.2);
  p.node_proj_w = xavier(cfg.token_dim + cfg.pe_dim, cfg.hidden_dim, rng);
  p.node_proj_b = gaussian(1, cfg.hidden_dim, rng, 0.01);
  p.edge_w1 = xavier(kEdgeRawDim, cfg.edge_dim, rng);
  p.edge_b1 = gaussian(1, cfg.edge_dim, rng, 0.01);
  p.edge_w2 = xavier(cfg.edge_dim, cfg.edge_dim, rng);
  p.edge_b2 = gaussian(1, cfg.edge_dim, rng, 0.01);
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    GatLayerParams layer;
    layer.w_src = xavier(cfg.hidden_dim, cfg.hidden_dim, rng);
    layer.w_tgt = xavier(cfg.hidden_dim, cfg.hidden_dim, rng);
    layer.w_edge = xavier(cfg.edge_dim, cfg.hidden_dim, rng);
    layer.attn = gaussian(1, cfg.hidden_dim, rng, 0.2);
    layer.w_out = xavier(cfg.hidden_dim, cfg.hidden_dim, rng, 0.5);
    layer.ln_scale = Mat(1, cfg.hidden_dim);
    for (auto& v : layer.ln_scale.data) v = 1.0;
    layer.ln_shift = Mat(1, cfg.hidden_dim);
    p.layers.push_back(std::move(layer));
  }
  // Near-identity readout keeps the graph token in the text space at init.
  p.readout = gaussian(cfg.hidden_dim, cfg.hidden_dim, rng, 0.02);
  for (std::size_t i = 0; i < cfg.hidden_dim; ++i) p.readout.at(i, i) += 1.0;
  return p;
}

std::vector<std::pair<std::string, Mat*>> EncoderParams::named_tensors() {
  std::vector<std::pair<std::string, Mat*>> out;
  out.emplace_back("token_table", &token_table);
  out.emplace_back("node_proj_w", &node_proj_w);
  out.emplace_back("node_proj_b", &node_proj_b);
  out.emplace_back("edge_w1", &edge_w1);
  out.emplace_back("edge_b1", &edge_b1);
  out.emplace_back("edge_w2", &edge_w2);
  out.emplace_back("edge_b2", &edge_b2);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string prefix = "layers." + std::to_string(l) + ".";
    out.emplace_back(prefix + "w_src", &layers[l].w_src);
    out.emplace_back(prefix + "w_tgt", &layers[l].w_tgt);
    out.emplace_back(prefix + "w_edge", &layers[l].w_edge);
    out.emplace_back(prefix + "attn", &layers[l].attn);
    out.emplace_back(prefix + "w_out", &layers[l].w_out);
    out.emplace_back(prefix + "ln_scale", &layers[l].ln_scale);
    out.emplace_back(prefix + "ln_shift", &layers[l].ln_shift);
  }
  out.emplace_back("readout", &readout);
  return out;
}

std::vector<std::pair<std::string, const Mat*>> EncoderParams::named_tensors() const {
  auto mutable_view = const_cast<EncoderParams*>(this)->named_tensors();
  std::vector<std::pair<std::string, const Mat*>> out;
  out.reserve(mutable_view.size());
  for (auto& [name, mat] : mutable_view) out.emplace_back(name, mat);
  return out;
}

std::vector<std::uint32_t> tokenize_text(const std::string& text, std::size_t vocab) {
  std::vector<std::uint32_t> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) {
      out.push_back(static_cast<std::uint32_t>(fnv1a64(token) % vocab));
      token.clear();
    }
  };
  for (char c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      token += static_cast<char>(std::tolower(u));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::string node_text(const GraphNode& n) {
  std::string text = n.name;
  if (!n.category.empty()) text += " " + n.category;
  for (const auto& [k, v] : n.attrs) text += " " + k + " " + v;
  return text;
}

std::vector<double> spatial_pe(const GeoPoint& p, const EncoderConfig& cfg) {
  validate_point(p);
  const std::size_t K = cfg.pe_frequencies();
  std::vector<double> out(cfg.pe_dim, 0.0);
  const double coords[2] = {p.lon / 180.0, p.lat / 90.0};
  std::size_t idx = 0;
  for (double c : coords) {
    for (std::size_t k = 0; k < K; ++k) {
      const double exponent =
          K == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(K - 1);
      const double f = cfg.f_min * std::pow(cfg.f_max / cfg.f_min, exponent);
      out[idx++] = std::sin(kTwoPi * f * c);
      out[idx++] = std::cos(kTwoPi * f * c);
    }
  }
  return out;
}

EncodedGraph build_encoded_graph(const Subgraph& s, const std::string& center_id,
                                 const EncoderConfig& cfg) {
  cfg.validate();
  EncodedGraph eg;
  std::map<std::string, const GraphNode*> by_id;
  for (const auto& c : s.centers) by_id.emplace(c.id, &c);
  for (const auto& e : s.nearby) by_id.emplace(e.node.id, &e.node);
  for (const auto& e : s.onehop) by_id.emplace(e.node.id, &e.node);
  if (!by_id.count(center_id)) throw DataError("center not in subgraph: " + center_id);

  std::map<std::string, int> index;
  for (const auto& [id, node] : by_id) {
    index.emplace(id, static_cast<int>(eg.node_ids.size()));
    eg.node_ids.push_back(id);
    eg.node_tokens.push_back(tokenize_text(node_text(*node), cfg.vocab_size));
    eg.anchors.push_back(node->anchor);
  }
  eg.center = index.at(center_id);

  // Directed record per edge per direction, grouped by source node in
  // (neighbor, edge ordinal) order, then one zero-feature self-loop each.
  std::vector<std::vector<std::pair<int, std::size_t>>> adjacency(eg.node_count());
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    const GraphEdge& e = s.edges[k];
    auto si = index.find(e.src);
    auto di = index.find(e.dst);
    if (si == index.end() || di == index.end()) {
      throw DataError("subgraph edge endpoint missing: " + e.src + " -> " + e.dst);
    }
    adjacency[si->second].emplace_back(di->second, k);
    adjacency[di->second].emplace_back(si->second, k);
  }
  for (auto& adj : adjacency) std::sort(adj.begin(), adj.end());

  eg.in_records.resize(eg.node_count());
  for (std::size_t i = 0; i < eg.node_count(); ++i) {
    for (const auto& [j, k] : adjacency[i]) {
      const GraphEdge& e = s.edges[k];
      const bool forward = index.at(e.src) == static_cast<int>(i);
      double bearing = e.bearing_deg;
      if (!forward && e.distance_m > 0.0) bearing = std::fmod(bearing + 180.0, 360.0);
      EdgeRawFeature raw{};
      raw[0] = std::log1p(e.distance_m);
      raw[1] = e.distance_m > 0.0 ? std::sin(bearing * kDegToRad) : 0.0;
      raw[2] = e.distance_m > 0.0 ? std::cos(bearing * kDegToRad) : 1.0;
      raw[3] = eg.anchors[j].lon - eg.anchors[i].lon;
      raw[4] = eg.anchors[j].lat - eg.anchors[i].lat;
      eg.in_records[i].push_back(static_cast<int>(eg.edge_raw.size()));
      eg.edge_raw.push_back(raw);
      eg.edge_ends.emplace_back(static_cast<int>(i), j);
    }
    // Self-loop: all-zero raw features.
    eg.in_records[i].push_back(static_cast<int>(eg.edge_raw.size()));
    eg.edge_raw.push_back(EdgeRawFeature{});
    eg.edge_ends.emplace_back(static_cast<int>(i), static_cast<int>(i));
  }
  return eg;
}

namespace detail {

Mat matmul(const Mat& A, const Mat& B) {
  Mat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double* a = A.row(i);
    double* c = C.row(i);
    for (std::size_t k = 0; k < A.cols; ++k) {
      const double av = a[k];
      if (av == 0.0) continue;
      const double* b = B.row(k);
      for (std::size_t j = 0; j < B.cols; ++j) c[j] += av * b[j];
    }
  }
  return C;
}

Mat matmul_bt(const Mat& A, const Mat& B) {
  Mat C(A.rows, B.rows);
  for (std::size_t i = 0; i < A.rows; ++i) {
    const double* a = A.row(i);
    for (std::size_t j = 0; j < B.rows; ++j) {
      const double* b = B.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < A.cols; ++k) acc += a[k] * b[k];
      C.at(i, j) = acc;
    }
  }
  return C;
}

Mat matmul_at(const Mat& A, const Mat& B) {
  Mat C(A.cols, B.cols);
  for (std::size_t k = 0; k < A.rows; ++k) {
    const double* a = A.row(k);
    const double* b = B.row(k);
    for (std::size_t i = 0; i < A.cols; ++i) {
      const double av = a[i];
      if (av == 0.0) continue;
      double* c = C.row(i);
      for (std::size_t j = 0; j < B.cols; ++j) c[j] += av * b[j];
    }
  }
  return C;
}

Mat node_input_features(const EncodedGraph& eg, const EncoderParams& params) {
  const EncoderConfig& cfg = params.config;
  Mat x(eg.node_count(), cfg.token_dim + cfg.pe_dim);
  for (std::size_t i = 0; i < eg.node_count(); ++i) {
    const auto& tokens = eg.node_tokens[i];
    if (!tokens.empty()) {
      const double inv = 1.0 / static_cast<double>(tokens.size());
      for (std::uint32_t t : tokens) {
        const double* row = params.token_table.row(t);
        for (std::size_t c = 0; c < cfg.token_dim; ++c) x.at(i, c) += row[c];
      }
      for (std::size_t c = 0; c < cfg.token_dim; ++c) x.at(i, c) *= inv;
    }
    const auto pe = spatial_pe(eg.anchors[i], cfg);
    for (std::size_t c = 0; c < cfg.pe_dim; ++c) x.at(i, cfg.token_dim + c) = pe[c];
  }
  return x;
}

void layer_forward(const Mat& h, const Mat& e_emb, const EncodedGraph& eg,
                   const GatLayerParams& layer, const EncoderConfig& cfg, LayerCache& cache,
                   double* min_kink) {
  const std::size_t d = cfg.hidden_dim;
  const std::size_t heads = cfg.num_heads;
  const std::size_t hd = cfg.head_dim();
  const std::size_t records = eg.record_count();

  cache.h_in = h;
  cache.p_src = matmul(h, layer.w_src);
  cache.p_tgt = matmul(h, layer.w_tgt);
  cache.e_eff = matmul(e_emb, layer.w_edge);

  cache.pre = Mat(records, d);
  cache.z = Mat(records, d);
  for (std::size_t r = 0; r < records; ++r) {
    const auto [i, j] = eg.edge_ends[r];
    const double* ps = cache.p_src.row(i);
    const double* pt = cache.p_tgt.row(j);
    const double* ee = cache.e_eff.row(r);
    double* pre = cache.pre.row(r);
    double* z = cache.z.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      pre[c] = ps[c] + pt[c] + ee[c];
      if (min_kink) *min_kink = std::min(*min_kink, std::abs(pre[c]));
      z[c] = leaky(pre[c], cfg.leaky_slope);
    }
  }

  cache.alpha = Mat(records, heads);
  cache.msg = Mat(eg.node_count(), d);
  for (std::size_t i = 0; i < eg.node_count(); ++i) {
    const auto& recs = eg.in_records[i];
    for (std::size_t hh = 0; hh < heads; ++hh) {
      double max_score = -std::numeric_limits<double>::infinity();
      std::vector<double> scores(recs.size());
      for (std::size_t ri = 0; ri < recs.size(); ++ri) {
        const double* z = cache.z.row(recs[ri]);
        double s = 0.0;
        for (std::size_t c = 0; c < hd; ++c) s += layer.attn.at(0, hh * hd + c) * z[hh * hd + c];
        scores[ri] = s;
        max_score = std::max(max_score, s);
      }
      double denom = 0.0;
      for (auto& s : scores) {
        s = std::exp(s - max_score);
        denom += s;
      }
      for (std::size_t ri = 0; ri < recs.size(); ++ri) {
        const double a = scores[ri] / denom;
        cache.alpha.at(recs[ri], hh) = a;
        const auto [self, j] = eg.edge_ends[recs[ri]];
        const double* pt = cache.p_tgt.row(j);
        double* msg = cache.msg.row(i);
        for (std::size_t c = 0; c < hd; ++c) msg[hh * hd + c] += a * pt[hh * hd + c];
      }
    }
  }

  cache.out_proj = matmul(cache.msg, layer.w_out);
  cache.residual = Mat(eg.node_count(), d);
  for (std::size_t i = 0; i < cache.residual.size(); ++i) {
    cache.residual.data[i] = cache.h_in.data[i] + cache.out_proj.data[i];
  }

  cache.h_out = Mat(eg.node_count(), d);
  cache.ln_mean.assign(eg.node_count(), 0.0);
  cache.ln_inv_std.assign(eg.node_count(), 1.0);
  if (!cfg.use_layer_norm) {
    cache.h_out = cache.residual;
    return;
  }
  for (std::size_t i = 0; i < eg.node_count(); ++i) {
    const double* x = cache.residual.row(i);
    double mean = 0.0;
    for (std::size_t c = 0; c < d; ++c) mean += x[c];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (x[c] - mean) * (x[c] - mean);
    var /= static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(var + cfg.layer_norm_eps);
    cache.ln_mean[i] = mean;
    cache.ln_inv_std[i] = inv_std;
    double* y = cache.h_out.row(i);
    for (std::size_t c = 0; c < d; ++c) {
      y[c] = layer.ln_scale.at(0, c) * (x[c] - mean) * inv_std + layer.ln_shift.at(0, c);
    }
  }
}

GraphCache forward_graph(const EncodedGraph& eg, const EncoderParams& params) {
  const EncoderConfig& cfg = params.config;
  GraphCache cache;
  cache.eg = eg;
  cache.min_kink = std::numeric_limits<double>::infinity();

  cache.x = node_input_features(eg, params);
  cache.h0 = matmul(cache.x, params.node_proj_w);
  for (std::size_t i = 0; i < eg.node_count(); ++i) {
    for (std::size_t c = 0; c < cfg.hidden_dim; ++c) {
      cache.h0.at(i, c) += params.node_proj_b.at(0, c);
    }
  }

  // Edge MLP, shared by every layer.
  const std::size_t records = eg.record_count();
  Mat raw(records, kEdgeRawDim);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < kEdgeRawDim; ++c) raw.at(r, c) = eg.edge_raw[r][c];
  }
  cache.z1 = matmul(raw, params.edge_w1);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < cfg.edge_dim; ++c) cache.z1.at(r, c) += params.edge_b1.at(0, c);
  }
  cache.a1 = Mat(records, cfg.edge_dim);
  for (std::size_t i = 0; i < cache.z1.size(); ++i) {
    cache.min_kink = std::min(cache.min_kink, std::abs(cache.z1.data[i]));
    cache.a1.data[i] = leaky(cache.z1.data[i], cfg.leaky_slope);
  }
  cache.e_emb = matmul(cache.a1, params.edge_w2);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < cfg.edge_dim; ++c) cache.e_emb.at(r, c) += params.edge_b2.at(0, c);
  }

  Mat h = cache.h0;
  cache.layers.resize(cfg.num_layers);
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    layer_forward(h, cache.e_emb, eg, params.layers[l], cfg, cache.layers[l],
                  &cache.min_kink);
    h = cache.layers[l].h_out;
  }

  cache.center_row.assign(h.row(eg.center), h.row(eg.center) + cfg.hidden_dim);
  cache.embedding.assign(cfg.hidden_dim, 0.0);
  for (std::size_t k = 0; k < cfg.hidden_dim; ++k) {
    const double v = cache.center_row[k];
    if (v == 0.0) continue;
    const double* w = params.readout.row(k);
    for (std::size_t c = 0; c < cfg.hidden_dim; ++c) cache.embedding[c] += v * w[c];
  }
  return cache;
}

TextCache forward_text(const std::string& text, const EncoderParams& params) {
  const EncoderConfig& cfg = params.config;
  TextCache cache;
  cache.tokens = tokenize_text(text, cfg.vocab_size);
  cache.x = Mat(1, cfg.token_dim + cfg.pe_dim);
  if (!cache.tokens.empty()) {
    const double inv = 1.0 / static_cast<double>(cache.tokens.size());
    for (std::uint32_t t : cache.tokens) {
      const double* row = params.token_table.row(t);
      for (std::size_t c = 0; c < cfg.token_dim; ++c) cache.x.at(0, c) += row[c];
    }
    for (std::size_t c = 0; c < cfg.token_dim; ++c) cache.x.at(0, c) *= inv;
  }
  Mat h = matmul(cache.x, params.node_proj_w);
  cache.embedding.assign(cfg.hidden_dim, 0.0);
  for (std::size_t c = 0; c < cfg.hidden_dim; ++c) {
    cache.embedding[c] = h.at(0, c) + params.node_proj_b.at(0, c);
  }
  return cache;
}

}  // namespace detail

Mat encode_nodes(const EncodedGraph& g, const EncoderParams& params) {
  const Mat x = detail::node_input_features(g, params);
  Mat h = detail::matmul(x, params.node_proj_w);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (std::size_t c = 0; c < params.config.hidden_dim; ++c) {
      h.at(i, c) += params.node_proj_b.at(0, c);
    }
  }
  return h;
}

Mat encode_edges(const EncodedGraph& g, const EncoderParams& params) {
  const EncoderConfig& cfg = params.config;
  const std::size_t records = g.record_count();
  Mat raw(records, kEdgeRawDim);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < kEdgeRawDim; ++c) raw.at(r, c) = g.edge_raw[r][c];
  }
  Mat z1 = detail::matmul(raw, params.edge_w1);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < cfg.edge_dim; ++c) z1.at(r, c) += params.edge_b1.at(0, c);
  }
  for (auto& v : z1.data) v = leaky(v, cfg.leaky_slope);
  Mat out = detail::matmul(z1, params.edge_w2);
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < cfg.edge_dim; ++c) out.at(r, c) += params.edge_b2.at(0, c);
  }
  return out;
}

Mat gatv2_layer(const Mat& H, const Mat& edge_emb, const EncodedGraph& g,
                const GatLayerParams& layer, const EncoderConfig& cfg) {
  if (H.rows != g.node_count() || H.cols != cfg.hidden_dim ||
      edge_emb.rows != g.record_count() || edge_emb.cols != cfg.edge_dim) {
    throw NumericError("gatv2_layer shape mismatch");
  }
  detail::LayerCache cache;
  detail::layer_forward(H, edge_emb, g, layer, cfg, cache, nullptr);
  return cache.h_out;
}

std::vector<double> graph_embedding(const Subgraph& s, const std::string& center_id,
                                    const EncoderParams& params) {
  const EncodedGraph eg = build_encoded_graph(s, center_id, params.config);
  return detail::forward_graph(eg, params).embedding;
}

std::vector<double> text_embedding(const std::string& text, const EncoderParams& params) {
  return detail::forward_text(text, params).embedding;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw NumericError("cosine dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine of zero-norm vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double infonce_loss(const std::vector<std::vector<double>>& queries,
                    const std::vector<std::vector<double>>& targets, double temperature) {
  if (queries.size() != targets.size() || queries.size() < 2) {
    throw NumericError("InfoNCE needs matched query/target lists of size >= 2");
  }
  if (temperature <= 0) throw NumericError("temperature must be > 0");
  const std::size_t n = queries.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> scores(n);
    double max_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      scores[j] = cosine_similarity(queries[i], targets[j]) / temperature;
      max_score = std::max(max_score, scores[j]);
    }
    double denom = 0.0;
    for (double s : scores) denom += std::exp(s - max_score);
    loss += std::log(denom) + max_score - scores[i];
  }
  return loss / static_cast<double>(n);
}

const std::vector<InstructionTemplate>& instruction_templates() {
  static const std::vector<InstructionTemplate> templates = {
      {1, "path", "Describe whether the {destination} is reachable from this viewpoint."},
      {1, "caption", "Provide a detailed description of the image content."},
      {2, "path",
       "Refer to the image and spatial graph, describe the pedestrian navigation context and "
       "spatial paths from this viewpoint."},
      {2, "context",
       "Use the image and graph together to describe the scene and its spatial context."},
  };
  return templates;
}

std::string build_query_instruction(int stage, const std::string& variant) {
  for (const auto& t : instruction_templates()) {
    if (t.stage == stage && t.variant == variant) {
      const std::string prefix =
          stage == 2 ? "[GRAPH_TOKEN][IMAGE_TOKEN]" : "[IMAGE_TOKEN]";
      return prefix + " Instruct: " + t.text;
    }
  }
  throw ConfigError("unknown instruction template: stage " + std::to_string(stage) + " " +
                    variant);
}

}  // namespace ugraph
