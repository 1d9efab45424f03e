#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssvep/core.hpp"
#include "ssvep/filterbank.hpp"

namespace ssvep {

// Dual-domain fusion network: f1 reads the filter-bank decomposition of a
// trial, f2 reads its per-stimulus least-squares projections, and f_m fuses the
// intermediate maps of both. Each path ends in an affine head; the decision
// uses the sum of the three logit vectors.
//
//   f1/f2: depth-mixing 1x1 conv -> spatial conv (rows x 1, F filters) -> dropout
//          -> conv 1x2 stride 2 (F) -> ELU -> dropout -> conv 1x10 (F) -> head
//   f_m:   [f1.2; f2.2] -> conv 1x2 stride 2 (F) -> ELU -> dropout
//          -> [f_m.3; f1.3; f2.3] -> conv 1x10 (F)
//          -> [f_m.4; f1.4; f2.4] -> head
struct NetConfig {
  int n_f = 0;
  int n_c = 0;
  int n_h = 5;
  int n_s = 0;
  int n_bands = 3;
  int n_filters = 120;
  double dropout_spatial = 0.1;
  double dropout_temporal = 0.6;
  double label_smoothing = 0.01;
  std::uint64_t seed = 0;
  // Ablation switches: disabling a domain also disables f_m.
  bool use_original = true;
  bool use_mlst = true;

  static constexpr int kShortKernel = 2;
  static constexpr int kShortStride = 2;
  static constexpr int kLongKernel = 10;

  int short_len() const { return (n_s - kShortKernel) / kShortStride + 1; }
  int long_len() const { return short_len() - kLongKernel + 1; }
  bool use_fusion() const { return use_original && use_mlst; }

  // Throws "invalid-config".
  void validate() const;
};

nlohmann::json net_config_to_json(const NetConfig& cfg);
NetConfig net_config_from_json(const nlohmann::json& j, NetConfig base = {});

enum ParamSlot : int {
  kF1MixW, kF1MixB, kF1SpatialW, kF1SpatialB, kF1ShortW, kF1ShortB, kF1LongW, kF1LongB,
  kF1HeadW, kF1HeadB,
  kF2MixW, kF2MixB, kF2SpatialW, kF2SpatialB, kF2ShortW, kF2ShortB, kF2LongW, kF2LongB,
  kF2HeadW, kF2HeadB,
  kFmShortW, kFmShortB, kFmLongW, kFmLongB, kFmHeadW, kFmHeadB,
  kParamSlotCount
};

struct ParamEntry {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;
  Eigen::Index fan_in = 1;
  bool bias = false;
};

std::array<ParamEntry, kParamSlotCount> param_layout(const NetConfig& cfg);

struct NetParams {
  NetConfig cfg;
  std::array<ParamEntry, kParamSlotCount> layout;
  Vector values;

  Eigen::Map<Matrix> view(ParamSlot slot);
  Eigen::Map<const Matrix> view(ParamSlot slot) const;
  Eigen::Index size() const { return values.size(); }
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, from cfg.seed.
NetParams net_init(const NetConfig& cfg);

struct NetSample {
  BandStack original;        // n_bands x (N_c x N_s)
  std::vector<Matrix> mlst;  // N_f x (2N_h x N_s)
};

struct NetOutputs {
  Vector f1, f2, fm, sum;
};

// Multipliers applied after the spatial convs and after the 1x2 convs:
// 0 or 1/(1-p). Empty matrices mean "no dropout".
struct DropoutMasks {
  Matrix f1_spatial, f2_spatial;
  Matrix f1_short, f2_short, fm_short;
};

DropoutMasks sample_dropout(const NetConfig& cfg, std::mt19937_64& rng);

// Throws "shape-mismatch". `masks` == nullptr means inference mode.
NetOutputs forward(const NetParams& params, const NetSample& sample,
                   const DropoutMasks* masks = nullptr);

struct LossTerms {
  double f1 = 0.0, f2 = 0.0, fm = 0.0, sum = 0.0;
  double total() const { return f1 + f2 + fm + sum; }
};

// Smoothed cross-entropy per head, target (1-eps) onehot + eps/N_f. Disabled
// heads contribute 0. Throws "invalid-label".
LossTerms loss_terms(const NetOutputs& outputs, int label, double smoothing,
                     const NetConfig& cfg);
double loss(const NetOutputs& outputs, int label, double smoothing, const NetConfig& cfg);

struct GradientResult {
  Vector grad;  // same layout as NetParams::values; mean over the batch
  double loss = 0.0;
};

// Exact gradient of the mean batch loss. `masks`, when given, holds one entry
// per sample; otherwise dropout is off.
GradientResult backward(const NetParams& params, std::span<const NetSample> batch,
                        std::span<const int> labels,
                        std::span<const DropoutMasks> masks = {});

struct AdamState {
  Vector m, v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 2e-4;
};

AdamState adam_init(Eigen::Index n, double learning_rate = 2e-4);
void adam_step(Vector& params, const Vector& grad, AdamState& state);

struct TrainOptions {
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = 2e-4;
  std::uint64_t seed = 0;
};

struct TrainResult {
  NetParams params;
  std::vector<double> loss_history;  // mean loss per epoch
  double train_accuracy = 0.0;       // inference-mode accuracy after the last epoch
};

// Throws "empty-source-set".
TrainResult train(std::span<const NetSample> samples, std::span<const int> labels,
                  const NetConfig& cfg, const TrainOptions& options);

// Inference-mode summed logits.
Vector infer(const NetParams& params, const NetSample& sample);

}  // namespace ssvep
