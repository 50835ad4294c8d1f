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

#include "helprank/head.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helprank/error.h"
#include "helprank/rng.h"
#include "json.hpp"

namespace helprank {
namespace {

constexpr int kHeadFormatVersion = 1;

void CheckInputs(const HeadConfig& config, size_t dim, bool has_side) {
  if (dim != config.input_dim) {
    throw Error(ErrorCode::kSchemaMismatch,
                fmt::format("embedding dim {} does not match head input dim {}", dim,
                            config.input_dim));
  }
  if (has_side != config.use_side_features) {
    throw Error(ErrorCode::kSchemaMismatch,
                config.use_side_features ? "head expects side features"
                                         : "text-only head got side features");
  }
}

// Raw output for one row. With side features, `pre` (if non-null) receives
// the hidden pre-activations.
template <typename T>
double ForwardRow(const HeadConfig& config, std::span<const double> p,
                  std::span<const T> x, std::span<const double> side,
                  double* pre = nullptr) {
  const size_t d = config.input_dim;
  if (!config.use_side_features) {
    double out = p[d];
    for (size_t i = 0; i < d; ++i) out += p[i] * static_cast<double>(x[i]);
    return out;
  }
  const size_t h = config.hidden_dim;
  const size_t in = d + kSideFeatureDim;
  const double* w1 = p.data();
  const double* b1 = w1 + h * in;
  const double* w2 = b1 + h;
  const double b2 = w2[h];
  double out = b2;
  for (size_t j = 0; j < h; ++j) {
    const double* row = w1 + j * in;
    double z = b1[j];
    for (size_t i = 0; i < d; ++i) z += row[i] * static_cast<double>(x[i]);
    for (size_t i = 0; i < kSideFeatureDim; ++i) z += row[d + i] * side[i];
    if (pre != nullptr) pre[j] = z;
    out += w2[j] * std::max(z, 0.0);
  }
  return out;
}

void CheckRows(const HeadData& data, std::span<const size_t> rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  for (size_t r : rows) {
    if (r >= data.size()) throw Error(ErrorCode::kInvalidArgument, "row out of range");
  }
}

nlohmann::json ConfigToJson(const HeadConfig& c) {
  nlohmann::json j;
  j["input_dim"] = c.input_dim;
  j["use_side_features"] = c.use_side_features;
  j["hidden_dim"] = c.hidden_dim;
  j["peak_lr"] = c.peak_lr;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

void HeadConfig::Validate() const {
  if (input_dim == 0 || batch_size == 0 || epochs < 1 || peak_lr < 0 ||
      (use_side_features && hidden_dim == 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "head config needs input_dim, batch_size, epochs (and hidden_dim "
                "with side features) >= 1 and peak_lr >= 0");
  }
}

size_t ParamCount(const HeadConfig& config) {
  if (!config.use_side_features) return config.input_dim + 1;
  const size_t in = config.input_dim + kSideFeatureDim;
  return config.hidden_dim * in + config.hidden_dim + config.hidden_dim + 1;
}

HeadModel InitHead(const HeadConfig& config) {
  config.Validate();
  HeadModel model;
  model.config = config;
  model.params.resize(ParamCount(config));
  Xoshiro256 rng(DeriveSeed(config.seed, 0));
  auto fill = [&](double* begin, size_t count, size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (size_t i = 0; i < count; ++i) begin[i] = rng.Uniform(-bound, bound);
  };
  double* p = model.params.data();
  if (!config.use_side_features) {
    fill(p, config.input_dim + 1, config.input_dim);
  } else {
    const size_t h = config.hidden_dim;
    const size_t in = config.input_dim + kSideFeatureDim;
    fill(p, h * in + h, in);    // W1, b1
    fill(p + h * in + h, h + 1, h);  // w2, b2
  }
  return model;
}

double Forward(const HeadModel& model, std::span<const double> embedding,
               std::span<const double> side) {
  CheckInputs(model.config, embedding.size(), !side.empty());
  return ForwardRow(model.config, model.params, embedding, side);
}

double Predict(const HeadModel& model, std::span<const double> embedding,
               std::span<const double> side) {
  return std::clamp(Forward(model, embedding, side), 0.0, 1.0);
}

std::vector<double> Predict(const HeadModel& model, const HeadData& data) {
  CheckInputs(model.config, data.dim, data.has_side());
  std::vector<double> out(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    out[i] = std::clamp(
        ForwardRow(model.config, model.params, data.embedding(i), data.side_row(i)),
        0.0, 1.0);
  }
  return out;
}

double MseLoss(std::span<const double> pred, std::span<const double> target) {
  if (pred.empty() || pred.size() != target.size()) {
    throw Error(ErrorCode::kInvalidArgument, "MSE needs equal non-empty lengths");
  }
  double sum = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double BatchLoss(const HeadModel& model, const HeadData& data,
                 std::span<const size_t> rows) {
  CheckInputs(model.config, data.dim, data.has_side());
  CheckRows(data, rows);
  double sum = 0;
  for (size_t r : rows) {
    const double d = ForwardRow(model.config, model.params, data.embedding(r),
                                data.side_row(r)) -
                     data.targets[r];
    sum += d * d;
  }
  return sum / static_cast<double>(rows.size());
}

double BatchLossAndGradient(const HeadModel& model, const HeadData& data,
                            std::span<const size_t> rows, std::vector<double>& grad) {
  const HeadConfig& c = model.config;
  CheckInputs(c, data.dim, data.has_side());
  CheckRows(data, rows);
  grad.assign(model.params.size(), 0.0);
  const double batch = static_cast<double>(rows.size());
  const size_t d = c.input_dim;
  std::vector<double> pre(c.use_side_features ? c.hidden_dim : 0);
  double loss = 0;
  for (size_t r : rows) {
    const auto x = data.embedding(r);
    const auto side = data.side_row(r);
    const double residual =
        ForwardRow(c, model.params, x, side, pre.data()) - data.targets[r];
    loss += residual * residual;
    const double scale = 2.0 * residual / batch;  // d loss / d output
    if (!c.use_side_features) {
      for (size_t i = 0; i < d; ++i) grad[i] += scale * static_cast<double>(x[i]);
      grad[d] += scale;
      continue;
    }
    const size_t h = c.hidden_dim;
    const size_t in = d + kSideFeatureDim;
    const double* w2 = model.params.data() + h * in + h;
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + h * in;
    double* g_w2 = g_b1 + h;
    for (size_t j = 0; j < h; ++j) {
      if (pre[j] <= 0) continue;
      g_w2[j] += scale * pre[j];
      const double dz = scale * w2[j];
      double* row = g_w1 + j * in;
      for (size_t i = 0; i < d; ++i) row[i] += dz * static_cast<double>(x[i]);
      for (size_t i = 0; i < kSideFeatureDim; ++i) row[d + i] += dz * side[i];
      g_b1[j] += dz;
    }
    g_w2[h] += scale;  // b2
  }
  return loss / batch;
}

void AdamStep(std::span<double> params, std::span<const double> grads,
              AdamState& state, double lr, double beta1, double beta2, double eps) {
  if (grads.size() != params.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gradient and parameter sizes differ");
  }
  if (lr < 0) throw Error(ErrorCode::kInvalidArgument, "negative learning rate");
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Error(ErrorCode::kNonFinite,
                  fmt::format("non-finite gradient at parameter {}", i));
    }
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / correction1;
    const double v_hat = state.v[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

double LrAt(int64_t step, int64_t steps_per_epoch, const HeadConfig& config) {
  if (steps_per_epoch < 1 || step < 0) {
    throw Error(ErrorCode::kInvalidArgument, "lr schedule needs step >= 0 and "
                                             "steps_per_epoch >= 1");
  }
  const int64_t total = steps_per_epoch * config.epochs;
  const double peak = config.peak_lr;
  if (step <= steps_per_epoch) {
    return peak * static_cast<double>(step) / static_cast<double>(steps_per_epoch);
  }
  if (step >= total) return 0.0;
  return peak * static_cast<double>(total - step) /
         static_cast<double>(total - steps_per_epoch);
}

std::string TrainLog::ToCsv() const {
  std::string out = "epoch,train_loss,val_rmse,best\n";
  for (size_t e = 0; e < val_rmse.size(); ++e) {
    out += fmt::format("{},{},{},{}\n", e + 1, train_loss[e], val_rmse[e],
                       static_cast<int>(e) == best_epoch ? 1 : 0);
  }
  return out;
}

TrainResult TrainHead(const HeadData& train, const HeadData& val,
                      const HeadConfig& config) {
  config.Validate();
  if (train.size() == 0 || val.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "head training needs non-empty train "
                                             "and validation sets");
  }
  CheckInputs(config, train.dim, train.has_side());
  CheckInputs(config, val.dim, val.has_side());

  TrainResult result;
  result.model = InitHead(config);
  HeadModel& model = result.model;
  std::vector<double> best_params = model.params;
  double best_rmse = 0;
  AdamState adam;
  std::vector<double> grad;

  const size_t n = train.size();
  const int64_t steps_per_epoch =
      static_cast<int64_t>((n + config.batch_size - 1) / config.batch_size);
  std::vector<size_t> order(n);
  int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Xoshiro256 rng(DeriveSeed(config.seed, static_cast<uint64_t>(epoch) + 1));
    rng.Shuffle(std::span<size_t>(order));
    double epoch_sq_error = 0;
    for (size_t begin = 0; begin < n; begin += config.batch_size, ++step) {
      const size_t end = std::min(n, begin + config.batch_size);
      std::span<const size_t> rows(order.data() + begin, end - begin);
      const double loss = BatchLossAndGradient(model, train, rows, grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFinite,
                    fmt::format("non-finite training loss at epoch {} step {}",
                                epoch + 1, step));
      }
      epoch_sq_error += loss * static_cast<double>(rows.size());
      const double lr = LrAt(step, steps_per_epoch, config);
      result.log.lr.push_back(lr);
      AdamStep(model.params, grad, adam, lr, config.adam_beta1, config.adam_beta2,
               config.adam_eps);
    }
    result.log.train_loss.push_back(epoch_sq_error / static_cast<double>(n));
    const auto predictions = Predict(model, val);
    double sq = 0;
    for (size_t i = 0; i < val.size(); ++i) {
      const double d = predictions[i] - val.targets[i];
      sq += d * d;
    }
    const double rmse = std::sqrt(sq / static_cast<double>(val.size()));
    result.log.val_rmse.push_back(rmse);
    if (epoch == 0 || rmse < best_rmse) {
      best_rmse = rmse;
      best_params = model.params;
      result.log.best_epoch = epoch;
    }
  }
  model.params = std::move(best_params);
  return result;
}

std::string HeadModel::ToJson() const {
  nlohmann::json j;
  j["format"] = "helprank-head";
  j["version"] = kHeadFormatVersion;
  j["config"] = ConfigToJson(config);
  nlohmann::json layers = nlohmann::json::array();
  auto add = [&](const char* name, std::vector<size_t> shape, size_t offset) {
    size_t count = 1;
    for (size_t s : shape) count *= s;
    nlohmann::json layer;
    layer["name"] = name;
    layer["shape"] = shape;
    layer["values"] = std::vector<double>(params.begin() + offset,
                                          params.begin() + offset + count);
    layers.push_back(std::move(layer));
    return offset + count;
  };
  const size_t d = config.input_dim;
  if (!config.use_side_features) {
    add("fc.bias", {1}, add("fc.weight", {1, d}, 0));
  } else {
    const size_t h = config.hidden_dim;
    size_t off = add("fc1.weight", {h, d + kSideFeatureDim}, 0);
    off = add("fc1.bias", {h}, off);
    off = add("fc2.weight", {1, h}, off);
    add("fc2.bias", {1}, off);
  }
  j["layers"] = std::move(layers);
  return j.dump() + "\n";
}

HeadModel HeadModel::FromJson(std::string_view text) {
  HeadModel model;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "helprank-head") {
      throw Error(ErrorCode::kFormat, "not a head checkpoint");
    }
    if (j.at("version").get<int>() != kHeadFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported head checkpoint version");
    }
    const auto& c = j.at("config");
    HeadConfig& config = model.config;
    config.input_dim = c.at("input_dim").get<size_t>();
    config.use_side_features = c.at("use_side_features").get<bool>();
    config.hidden_dim = c.at("hidden_dim").get<size_t>();
    config.peak_lr = c.at("peak_lr").get<double>();
    config.batch_size = c.at("batch_size").get<size_t>();
    config.epochs = c.at("epochs").get<int>();
    config.adam_beta1 = c.at("adam_beta1").get<double>();
    config.adam_beta2 = c.at("adam_beta2").get<double>();
    config.adam_eps = c.at("adam_eps").get<double>();
    config.seed = c.at("seed").get<uint64_t>();
    config.Validate();
    for (const auto& layer : j.at("layers")) {
      const auto values = layer.at("values").get<std::vector<double>>();
      model.params.insert(model.params.end(), values.begin(), values.end());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad head checkpoint: ") + e.what());
  }
  if (model.params.size() != ParamCount(model.config)) {
    throw Error(ErrorCode::kFormat, "checkpoint parameter count does not match its "
                                    "architecture");
  }
  return model;
}

}  // namespace helprank
