#include "ssvep/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssvep/error.hpp"

namespace ssvep {

using StridedMap = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;
using MutStridedMap = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;

void NetConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error("invalid-config", msg); };
  if (n_f < 2) bad("n_f must be >= 2");
  if (n_c < 1) bad("n_c must be >= 1");
  if (n_h < 1) bad("n_h must be >= 1");
  if (n_bands < 1) bad("n_bands must be >= 1");
  if (n_filters < 1) bad("n_filters must be > 0");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) bad("label smoothing must lie in [0, 1)");
  if (!(dropout_spatial >= 0.0 && dropout_spatial < 1.0) ||
      !(dropout_temporal >= 0.0 && dropout_temporal < 1.0)) {
    bad("dropout rates must lie in [0, 1)");
  }
  if (!use_original && !use_mlst) bad("at least one input domain must be enabled");
  if (n_s < kShortKernel || long_len() < 1) {
    bad("n_s = " + std::to_string(n_s) + " leaves no samples after the 1x2 stride-2 and 1x10 convs");
  }
}

nlohmann::json net_config_to_json(const NetConfig& c) {
  return {{"n_f", c.n_f},
          {"n_c", c.n_c},
          {"n_h", c.n_h},
          {"n_s", c.n_s},
          {"n_bands", c.n_bands},
          {"n_filters", c.n_filters},
          {"dropout_spatial", c.dropout_spatial},
          {"dropout_temporal", c.dropout_temporal},
          {"label_smoothing", c.label_smoothing},
          {"seed", c.seed},
          {"use_original", c.use_original},
          {"use_mlst", c.use_mlst}};
}

NetConfig net_config_from_json(const nlohmann::json& j, NetConfig c) {
  c.n_f = j.value("n_f", c.n_f);
  c.n_c = j.value("n_c", c.n_c);
  c.n_h = j.value("n_h", c.n_h);
  c.n_s = j.value("n_s", c.n_s);
  c.n_bands = j.value("n_bands", c.n_bands);
  c.n_filters = j.value("n_filters", c.n_filters);
  c.dropout_spatial = j.value("dropout_spatial", c.dropout_spatial);
  c.dropout_temporal = j.value("dropout_temporal", c.dropout_temporal);
  c.label_smoothing = j.value("label_smoothing", c.label_smoothing);
  c.seed = j.value("seed", c.seed);
  c.use_original = j.value("use_original", c.use_original);
  c.use_mlst = j.value("use_mlst", c.use_mlst);
  return c;
}

std::array<ParamEntry, kParamSlotCount> param_layout(const NetConfig& cfg) {
  const Eigen::Index f = cfg.n_filters;
  const Eigen::Index k_short = NetConfig::kShortKernel;
  const Eigen::Index k_long = NetConfig::kLongKernel;
  const Eigen::Index t4 = cfg.long_len();
  std::array<ParamEntry, kParamSlotCount> l;
  auto set = [&](ParamSlot s, std::string name, Eigen::Index r, Eigen::Index c, Eigen::Index fan,
                 bool bias) { l[s] = {std::move(name), r, c, 0, fan, bias}; };

  auto path = [&](int base, const std::string& p, Eigen::Index depth, Eigen::Index rows) {
    auto s = [base](int i) { return static_cast<ParamSlot>(base + i); };
    set(s(0), p + ".mix.w", 1, depth, depth, false);
    set(s(1), p + ".mix.b", 1, 1, depth, true);
    set(s(2), p + ".spatial.w", f, rows, rows, false);
    set(s(3), p + ".spatial.b", f, 1, rows, true);
    set(s(4), p + ".short.w", f, k_short * f, k_short * f, false);
    set(s(5), p + ".short.b", f, 1, k_short * f, true);
    set(s(6), p + ".long.w", f, k_long * f, k_long * f, false);
    set(s(7), p + ".long.b", f, 1, k_long * f, true);
    set(s(8), p + ".head.w", cfg.n_f, f * t4, f * t4, false);
    set(s(9), p + ".head.b", cfg.n_f, 1, f * t4, true);
  };
  path(kF1MixW, "f1", cfg.n_bands, cfg.n_c);
  path(kF2MixW, "f2", cfg.n_f, 2 * cfg.n_h);
  set(kFmShortW, "fm.short.w", f, k_short * 2 * f, k_short * 2 * f, false);
  set(kFmShortB, "fm.short.b", f, 1, k_short * 2 * f, true);
  set(kFmLongW, "fm.long.w", f, k_long * 3 * f, k_long * 3 * f, false);
  set(kFmLongB, "fm.long.b", f, 1, k_long * 3 * f, true);
  set(kFmHeadW, "fm.head.w", cfg.n_f, 3 * f * t4, 3 * f * t4, false);
  set(kFmHeadB, "fm.head.b", cfg.n_f, 1, 3 * f * t4, true);

  Eigen::Index offset = 0;
  for (auto& e : l) {
    e.offset = offset;
    offset += e.rows * e.cols;
  }
  return l;
}

Eigen::Map<Matrix> NetParams::view(ParamSlot slot) {
  const auto& e = layout[slot];
  return {values.data() + e.offset, e.rows, e.cols};
}

Eigen::Map<const Matrix> NetParams::view(ParamSlot slot) const {
  const auto& e = layout[slot];
  return {values.data() + e.offset, e.rows, e.cols};
}

NetParams net_init(const NetConfig& cfg) {
  cfg.validate();
  NetParams p;
  p.cfg = cfg;
  p.layout = param_layout(cfg);
  const auto& last = p.layout.back();
  p.values = Vector::Zero(last.offset + last.rows * last.cols);
  std::mt19937_64 rng(cfg.seed);
  for (const auto& e : p.layout) {
    if (e.bias) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(e.fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < e.rows * e.cols; ++i) p.values(e.offset + i) = dist(rng);
  }
  return p;
}

namespace {

Matrix bernoulli_mask(Eigen::Index rows, Eigen::Index cols, double p, std::mt19937_64& rng) {
  if (p <= 0.0) return {};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep = 1.0 / (1.0 - p);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng) < p ? 0.0 : keep;
  return m;
}

// Column k*Fin + i of the kernel matrix multiplies x(i, stride*j + k).
Matrix im2col(const Matrix& x, int kernel, int stride, Eigen::Index out_len) {
  const Eigen::Index fin = x.rows();
  Matrix col(kernel * fin, out_len);
  for (int k = 0; k < kernel; ++k) {
    col.middleRows(k * fin, fin) =
        StridedMap(x.data() + k * fin, fin, out_len, Eigen::OuterStride<>(stride * fin));
  }
  return col;
}

void col2im_add(const Matrix& dcol, int kernel, int stride, Matrix& dx) {
  const Eigen::Index fin = dx.rows();
  const Eigen::Index out_len = dcol.cols();
  for (int k = 0; k < kernel; ++k) {
    MutStridedMap(dx.data() + k * fin, fin, out_len, Eigen::OuterStride<>(stride * fin)) +=
        dcol.middleRows(k * fin, fin);
  }
}

Matrix elu(const Matrix& s) {
  return s.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

Matrix elu_grad(const Matrix& s) {
  return s.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
}

void apply_mask(Matrix& x, const Matrix* mask) {
  if (mask && mask->size() > 0) x.array() *= mask->array();
}

Eigen::Map<const Vector> flat(const Matrix& m) { return {m.data(), m.size()}; }

struct PathCache {
  Matrix z1, out2, col3, s3, out3, col4, out4;
  const Matrix* mask2 = nullptr;
  const Matrix* mask3 = nullptr;
};

struct FusionCache {
  Matrix g2, col3, s3, out3, g3, col4, g4;
  const Matrix* mask3 = nullptr;
};

struct Cache {
  PathCache p1, p2;
  FusionCache fm;
};

void path_forward(const NetParams& params, int base, std::span<const Matrix> inputs,
                  const Matrix* mask2, const Matrix* mask3, PathCache& c, Vector& logits) {
  auto slot = [base](int i) { return static_cast<ParamSlot>(base + i); };
  const auto mix_w = params.view(slot(0));
  const double mix_b = params.view(slot(1))(0, 0);

  c.z1 = mix_w(0, 0) * inputs[0];
  for (std::size_t d = 1; d < inputs.size(); ++d) {
    c.z1 += mix_w(0, static_cast<Eigen::Index>(d)) * inputs[d];
  }
  c.z1.array() += mix_b;

  c.out2 = params.view(slot(2)) * c.z1;
  c.out2.colwise() += Vector(params.view(slot(3)));
  c.mask2 = mask2;
  apply_mask(c.out2, mask2);

  const auto t3 = params.cfg.short_len();
  c.col3 = im2col(c.out2, NetConfig::kShortKernel, NetConfig::kShortStride, t3);
  c.s3 = params.view(slot(4)) * c.col3;
  c.s3.colwise() += Vector(params.view(slot(5)));
  c.out3 = elu(c.s3);
  c.mask3 = mask3;
  apply_mask(c.out3, mask3);

  const auto t4 = params.cfg.long_len();
  c.col4 = im2col(c.out3, NetConfig::kLongKernel, 1, t4);
  c.out4 = params.view(slot(6)) * c.col4;
  c.out4.colwise() += Vector(params.view(slot(7)));

  logits = params.view(slot(8)) * flat(c.out4) + Vector(params.view(slot(9)));
}

// Accumulates parameter gradients into `grad` and consumes the upstream
// gradients of the stage outputs.
void path_backward(const NetParams& params, int base, std::span<const Matrix> inputs,
                   const PathCache& c, const Vector& dlogits, Matrix dout2, Matrix dout3,
                   Matrix dout4, NetParams& grad) {
  auto slot = [base](int i) { return static_cast<ParamSlot>(base + i); };
  const Eigen::Index f = params.cfg.n_filters;

  // head
  grad.view(slot(8)).noalias() += dlogits * flat(c.out4).transpose();
  grad.view(slot(9)) += dlogits;
  dout4 += Eigen::Map<const Matrix>(
      Vector(params.view(slot(8)).transpose() * dlogits).data(), f, c.out4.cols());

  // 1x10
  grad.view(slot(6)).noalias() += dout4 * c.col4.transpose();
  grad.view(slot(7)) += dout4.rowwise().sum();
  col2im_add(params.view(slot(6)).transpose() * dout4, NetConfig::kLongKernel, 1, dout3);

  // dropout, ELU, 1x2 stride 2
  Matrix ds3 = dout3;
  apply_mask(ds3, c.mask3);
  ds3.array() *= elu_grad(c.s3).array();
  grad.view(slot(4)).noalias() += ds3 * c.col3.transpose();
  grad.view(slot(5)) += ds3.rowwise().sum();
  col2im_add(params.view(slot(4)).transpose() * ds3, NetConfig::kShortKernel,
             NetConfig::kShortStride, dout2);

  // dropout, spatial
  apply_mask(dout2, c.mask2);
  grad.view(slot(2)).noalias() += dout2 * c.z1.transpose();
  grad.view(slot(3)) += dout2.rowwise().sum();
  const Matrix dz1 = params.view(slot(2)).transpose() * dout2;

  auto mix_w = grad.view(slot(0));
  for (std::size_t d = 0; d < inputs.size(); ++d) {
    mix_w(0, static_cast<Eigen::Index>(d)) += (dz1.array() * inputs[d].array()).sum();
  }
  grad.view(slot(1))(0, 0) += dz1.sum();
}

void check_sample(const NetConfig& cfg, const NetSample& s) {
  auto bad = [](const std::string& msg) { throw Error("shape-mismatch", msg); };
  if (cfg.use_original) {
    if (static_cast<int>(s.original.size()) != cfg.n_bands) bad("wrong number of filter-bank bands");
    for (const auto& m : s.original) {
      if (m.rows() != cfg.n_c || m.cols() != cfg.n_s) bad("original-domain input has wrong shape");
    }
  }
  if (cfg.use_mlst) {
    if (static_cast<int>(s.mlst.size()) != cfg.n_f) bad("wrong number of transformed slices");
    for (const auto& m : s.mlst) {
      if (m.rows() != 2 * cfg.n_h || m.cols() != cfg.n_s) bad("transformed input has wrong shape");
    }
  }
}

NetOutputs run_forward(const NetParams& params, const NetSample& sample,
                       const DropoutMasks* masks, Cache& cache) {
  const auto& cfg = params.cfg;
  check_sample(cfg, sample);
  auto mask = [masks](const Matrix DropoutMasks::*field) -> const Matrix* {
    return masks ? &(masks->*field) : nullptr;
  };
  NetOutputs out;
  out.f1 = Vector::Zero(cfg.n_f);
  out.f2 = Vector::Zero(cfg.n_f);
  out.fm = Vector::Zero(cfg.n_f);
  if (cfg.use_original) {
    path_forward(params, kF1MixW, sample.original, mask(&DropoutMasks::f1_spatial),
                 mask(&DropoutMasks::f1_short), cache.p1, out.f1);
  }
  if (cfg.use_mlst) {
    path_forward(params, kF2MixW, sample.mlst, mask(&DropoutMasks::f2_spatial),
                 mask(&DropoutMasks::f2_short), cache.p2, out.f2);
  }
  if (cfg.use_fusion()) {
    auto& c = cache.fm;
    const Eigen::Index f = cfg.n_filters;
    c.g2.resize(2 * f, cfg.n_s);
    c.g2 << cache.p1.out2, cache.p2.out2;
    c.col3 = im2col(c.g2, NetConfig::kShortKernel, NetConfig::kShortStride, cfg.short_len());
    c.s3 = params.view(kFmShortW) * c.col3;
    c.s3.colwise() += Vector(params.view(kFmShortB));
    c.out3 = elu(c.s3);
    c.mask3 = mask(&DropoutMasks::fm_short);
    apply_mask(c.out3, c.mask3);

    c.g3.resize(3 * f, cfg.short_len());
    c.g3 << c.out3, cache.p1.out3, cache.p2.out3;
    c.col4 = im2col(c.g3, NetConfig::kLongKernel, 1, cfg.long_len());
    Matrix s4 = params.view(kFmLongW) * c.col4;
    s4.colwise() += Vector(params.view(kFmLongB));

    c.g4.resize(3 * f, cfg.long_len());
    c.g4 << s4, cache.p1.out4, cache.p2.out4;
    out.fm = params.view(kFmHeadW) * flat(c.g4) + Vector(params.view(kFmHeadB));
  }
  out.sum = out.f1 + out.f2 + out.fm;
  return out;
}

Vector softmax(const Vector& z) {
  const Vector e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

double smoothed_ce(const Vector& logits, int label, double eps) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  const auto n = static_cast<double>(logits.size());
  double l = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double q = (i == label ? 1.0 - eps : 0.0) + eps / n;
    l += q * (lse - logits(i));
  }
  return l;
}

Vector smoothed_target(Eigen::Index n, int label, double eps) {
  Vector q = Vector::Constant(n, eps / static_cast<double>(n));
  q(label) += 1.0 - eps;
  return q;
}

double accumulate(const NetParams& params, const NetSample& sample, int label,
                  const DropoutMasks* masks, double scale, NetParams& grad) {
  const auto& cfg = params.cfg;
  Cache cache;
  const NetOutputs out = run_forward(params, sample, masks, cache);
  const double value = loss(out, label, cfg.label_smoothing, cfg);

  const Vector q = smoothed_target(cfg.n_f, label, cfg.label_smoothing);
  const Vector d_sum = softmax(out.sum) - q;
  const Eigen::Index f = cfg.n_filters;

  Vector d1 = d_sum, d2 = d_sum, dm = d_sum;
  if (cfg.use_original) d1 += softmax(out.f1) - q;
  if (cfg.use_mlst) d2 += softmax(out.f2) - q;
  if (cfg.use_fusion()) dm += softmax(out.fm) - q;
  d1 *= scale;
  d2 *= scale;
  dm *= scale;

  Matrix dout2_1, dout3_1, dout4_1, dout2_2, dout3_2, dout4_2;
  if (cfg.use_original) {
    dout2_1 = Matrix::Zero(f, cfg.n_s);
    dout3_1 = Matrix::Zero(f, cfg.short_len());
    dout4_1 = Matrix::Zero(f, cfg.long_len());
  }
  if (cfg.use_mlst) {
    dout2_2 = Matrix::Zero(f, cfg.n_s);
    dout3_2 = Matrix::Zero(f, cfg.short_len());
    dout4_2 = Matrix::Zero(f, cfg.long_len());
  }

  if (cfg.use_fusion()) {
    const auto& c = cache.fm;
    const Eigen::Index t3 = cfg.short_len();
    const Eigen::Index t4 = cfg.long_len();
    grad.view(kFmHeadW).noalias() += dm * flat(c.g4).transpose();
    grad.view(kFmHeadB) += dm;
    const Vector dg4_flat = params.view(kFmHeadW).transpose() * dm;
    const Eigen::Map<const Matrix> dg4(dg4_flat.data(), 3 * f, t4);
    const Matrix ds4 = dg4.topRows(f);
    dout4_1 += dg4.middleRows(f, f);
    dout4_2 += dg4.bottomRows(f);

    grad.view(kFmLongW).noalias() += ds4 * c.col4.transpose();
    grad.view(kFmLongB) += ds4.rowwise().sum();
    Matrix dg3 = Matrix::Zero(3 * f, t3);
    col2im_add(params.view(kFmLongW).transpose() * ds4, NetConfig::kLongKernel, 1, dg3);
    dout3_1 += dg3.middleRows(f, f);
    dout3_2 += dg3.bottomRows(f);

    Matrix ds3 = dg3.topRows(f);
    apply_mask(ds3, c.mask3);
    ds3.array() *= elu_grad(c.s3).array();
    grad.view(kFmShortW).noalias() += ds3 * c.col3.transpose();
    grad.view(kFmShortB) += ds3.rowwise().sum();
    Matrix dg2 = Matrix::Zero(2 * f, cfg.n_s);
    col2im_add(params.view(kFmShortW).transpose() * ds3, NetConfig::kShortKernel,
               NetConfig::kShortStride, dg2);
    dout2_1 += dg2.topRows(f);
    dout2_2 += dg2.bottomRows(f);
  }
  if (cfg.use_original) {
    path_backward(params, kF1MixW, sample.original, cache.p1, d1, std::move(dout2_1),
                  std::move(dout3_1), std::move(dout4_1), grad);
  }
  if (cfg.use_mlst) {
    path_backward(params, kF2MixW, sample.mlst, cache.p2, d2, std::move(dout2_2),
                  std::move(dout3_2), std::move(dout4_2), grad);
  }
  return value;
}

}  // namespace

DropoutMasks sample_dropout(const NetConfig& cfg, std::mt19937_64& rng) {
  const Eigen::Index f = cfg.n_filters;
  DropoutMasks m;
  m.f1_spatial = bernoulli_mask(f, cfg.n_s, cfg.dropout_spatial, rng);
  m.f2_spatial = bernoulli_mask(f, cfg.n_s, cfg.dropout_spatial, rng);
  m.f1_short = bernoulli_mask(f, cfg.short_len(), cfg.dropout_temporal, rng);
  m.f2_short = bernoulli_mask(f, cfg.short_len(), cfg.dropout_temporal, rng);
  m.fm_short = bernoulli_mask(f, cfg.short_len(), cfg.dropout_temporal, rng);
  return m;
}

NetOutputs forward(const NetParams& params, const NetSample& sample, const DropoutMasks* masks) {
  Cache cache;
  return run_forward(params, sample, masks, cache);
}

LossTerms loss_terms(const NetOutputs& out, int label, double smoothing, const NetConfig& cfg) {
  if (label < 0 || label >= out.sum.size()) {
    throw Error("invalid-label", "label " + std::to_string(label) + " outside [0, " +
                                     std::to_string(out.sum.size()) + ")");
  }
  LossTerms l;
  if (cfg.use_original) l.f1 = smoothed_ce(out.f1, label, smoothing);
  if (cfg.use_mlst) l.f2 = smoothed_ce(out.f2, label, smoothing);
  if (cfg.use_fusion()) l.fm = smoothed_ce(out.fm, label, smoothing);
  l.sum = smoothed_ce(out.sum, label, smoothing);
  return l;
}

double loss(const NetOutputs& outputs, int label, double smoothing, const NetConfig& cfg) {
  return loss_terms(outputs, label, smoothing, cfg).total();
}

GradientResult backward(const NetParams& params, std::span<const NetSample> batch,
                        std::span<const int> labels, std::span<const DropoutMasks> masks) {
  if (batch.empty() || batch.size() != labels.size()) {
    throw Error("shape-mismatch", "batch and label counts differ or are zero");
  }
  if (!masks.empty() && masks.size() != batch.size()) {
    throw Error("shape-mismatch", "need one dropout mask set per sample");
  }
  NetParams grad = params;
  grad.values.setZero();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total += accumulate(params, batch[i], labels[i], masks.empty() ? nullptr : &masks[i], scale,
                        grad);
  }
  return {std::move(grad.values), total * scale};
}

AdamState adam_init(Eigen::Index n, double learning_rate) {
  AdamState s;
  s.m = Vector::Zero(n);
  s.v = Vector::Zero(n);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(Vector& params, const Vector& grad, AdamState& s) {
  if (params.size() != grad.size() || s.m.size() != grad.size()) {
    throw Error("shape-mismatch", "adam_step: parameter, gradient and state sizes differ");
  }
  ++s.step;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * grad;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  params.array() -= s.learning_rate * (s.m.array() / c1) /
                    ((s.v.array() / c2).sqrt() + s.epsilon);
}

TrainResult train(std::span<const NetSample> samples, std::span<const int> labels,
                  const NetConfig& cfg, const TrainOptions& options) {
  if (samples.empty()) throw Error("empty-source-set", "no source trials to train on");
  if (samples.size() != labels.size()) throw Error("shape-mismatch", "sample/label count mismatch");
  if (options.epochs < 1 || options.batch_size < 1) {
    throw Error("invalid-config", "epochs and batch size must be positive");
  }
  TrainResult result;
  result.params = net_init(cfg);
  AdamState adam = adam_init(result.params.size(), options.learning_rate);
  std::mt19937_64 rng(options.seed);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto bs = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t n = std::min(bs, order.size() - start);
      NetParams grad = result.params;
      grad.values.setZero();
      const double scale = 1.0 / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order[start + k];
        const DropoutMasks masks = sample_dropout(cfg, rng);
        loss_sum += accumulate(result.params, samples[idx], labels[idx], &masks, scale, grad);
      }
      adam_step(result.params.values, grad.values, adam);
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(samples.size()));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Cache cache;
    const auto out = run_forward(result.params, samples[i], nullptr, cache);
    Eigen::Index best = 0;
    out.sum.maxCoeff(&best);
    if (static_cast<int>(best) == labels[i]) ++correct;
  }
  result.train_accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
  return result;
}

Vector infer(const NetParams& params, const NetSample& sample) {
  return forward(params, sample, nullptr).sum;
}

}  // namespace ssvep
