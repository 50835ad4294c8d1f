/*
 * Copyright 2026 The HelpRank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HELPRANK_HEAD_H_
#define HELPRANK_HEAD_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace helprank {

// Star rating and word count.
inline constexpr size_t kSideFeatureDim = 2;

struct HeadConfig {
  size_t input_dim = 768;
  bool use_side_features = false;
  size_t hidden_dim = 64;  // two-layer head only
  double peak_lr = 1e-4;
  size_t batch_size = 16;
  int epochs = 5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;

  void Validate() const;
};

// Rows of (embedding, optional side features, target). Embeddings are stored
// as float32, the precision of the interchange file.
struct HeadData {
  size_t dim = 0;
  std::vector<std::string> ids;
  std::vector<float> embeddings;  // row-major, size() * dim
  std::vector<double> side;       // row-major, size() * kSideFeatureDim, or empty
  std::vector<double> targets;

  size_t size() const { return targets.size(); }
  bool has_side() const { return !side.empty(); }
  std::span<const float> embedding(size_t i) const {
    return {embeddings.data() + i * dim, dim};
  }
  std::span<const double> side_row(size_t i) const {
    if (side.empty()) return {};
    return {side.data() + i * kSideFeatureDim, kSideFeatureDim};
  }
};

// Parameters, flattened in this order:
//   text only:  w[input_dim], b
//   with side:  W1[hidden][input_dim + 2], b1[hidden], w2[hidden], b2
// The single-layer head has no activation; the two-layer head applies ReLU
// after the first layer.
struct HeadModel {
  HeadConfig config;
  std::vector<double> params;

  std::string ToJson() const;
  static HeadModel FromJson(std::string_view json);
};

size_t ParamCount(const HeadConfig& config);

// Uniform in +/- 1/sqrt(fan_in) for every weight and bias of a layer.
HeadModel InitHead(const HeadConfig& config);

// Raw (unclamped) output. Throws kSchemaMismatch on a dimension mismatch or
// when side features are given to a text-only head (or omitted for a
// two-layer head).
double Forward(const HeadModel& model, std::span<const double> embedding,
               std::span<const double> side = {});

// Inference output, clamped to [0, 1].
double Predict(const HeadModel& model, std::span<const double> embedding,
               std::span<const double> side = {});
std::vector<double> Predict(const HeadModel& model, const HeadData& data);

double MseLoss(std::span<const double> pred, std::span<const double> target);

// Mean squared error of the raw outputs over `rows`, and its gradient with
// respect to every parameter (resized to ParamCount).
double BatchLoss(const HeadModel& model, const HeadData& data,
                 std::span<const size_t> rows);
double BatchLossAndGradient(const HeadModel& model, const HeadData& data,
                            std::span<const size_t> rows, std::vector<double>& grad);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  int64_t step = 0;
};

// Bias-corrected Adam. Throws kNonFinite, leaving everything untouched, if a
// gradient component is not finite.
void AdamStep(std::span<double> params, std::span<const double> grads,
              AdamState& state, double lr, double beta1, double beta2, double eps);

// Linear warmup from 0 at step 0 to peak_lr at steps_per_epoch, then linear
// decay to 0 at epochs * steps_per_epoch. Update number s (0-based) uses
// LrAt(s).
double LrAt(int64_t step, int64_t steps_per_epoch, const HeadConfig& config);

struct TrainLog {
  std::vector<double> train_loss;  // per epoch, unclamped MSE
  std::vector<double> val_rmse;    // per epoch, clamped predictions
  std::vector<double> lr;          // per update
  int best_epoch = 0;              // 0-based argmin of val_rmse, earliest wins

  std::string ToCsv() const;
};

struct TrainResult {
  HeadModel model;  // parameters from the best epoch
  TrainLog log;
};

// Shuffles the training rows each epoch (stream DeriveSeed(seed, epoch + 1)),
// keeps the last partial batch, and restores the best validation epoch.
TrainResult TrainHead(const HeadData& train, const HeadData& val,
                      const HeadConfig& config);

}  // namespace helprank

#endif  // HELPRANK_HEAD_H_
