/*
 * Copyright 2026 The pctl Authors.
 *
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

#include "pctl/model.h"

#include <cassert>
#include <cmath>
#include <random>
#include <utility>

#include "pctl/binary_io.h"
#include "pctl/errors.h"

namespace pctl {

double Softplus(double z) {
  // log(1 + e^z) without overflow.
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void MatVec(const Dense& layer, std::span<const double> in,
            std::vector<double>& out) {
  out.assign(layer.bias.begin(), layer.bias.end());
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double* row = layer.weight.data() + o * layer.in;
    double acc = out[o];
    for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * in[i];
    out[o] = acc;
  }
}

// Activations of every backbone layer, [0] being the input.
std::vector<std::vector<double>> BackboneActivations(
    const Parameters& p, std::span<const double> x) {
  std::vector<std::vector<double>> acts;
  acts.reserve(p.backbone.size() + 1);
  acts.emplace_back(x.begin(), x.end());
  for (const Dense& layer : p.backbone) {
    std::vector<double> next;
    MatVec(layer, acts.back(), next);
    for (double& v : next) v = std::tanh(v);
    acts.push_back(std::move(next));
  }
  return acts;
}

double HeadLogit(const Dense& head, std::span<const double> h) {
  double z = head.bias[0];
  for (std::size_t i = 0; i < head.in; ++i) z += head.weight[i] * h[i];
  return z;
}

Parameters ZeroLike(const Parameters& p) {
  Parameters g;
  for (const Dense& layer : p.backbone) g.backbone.emplace_back(layer.in, layer.out);
  g.regression_head = Dense(p.regression_head.in, 1);
  g.percentile_head = Dense(p.percentile_head.in, 1);
  return g;
}

Parameters Shape(std::size_t input_dim, const std::vector<std::size_t>& hidden) {
  if (input_dim == 0) throw ValidationError("model input_dim must be >= 1");
  if (hidden.empty()) throw ValidationError("model needs at least one hidden layer");
  Parameters p;
  std::size_t fan_in = input_dim;
  for (std::size_t width : hidden) {
    if (width == 0) throw ValidationError("hidden layer width must be >= 1");
    p.backbone.emplace_back(fan_in, width);
    fan_in = width;
  }
  p.regression_head = Dense(fan_in, 1);
  p.percentile_head = Dense(fan_in, 1);
  return p;
}

}  // namespace

void Parameters::ForEachTensor(
    const std::function<void(const std::string&, std::span<double>)>& fn) {
  for (std::size_t l = 0; l < backbone.size(); ++l) {
    const std::string prefix = "backbone." + std::to_string(l);
    fn(prefix + ".weight", backbone[l].weight);
    fn(prefix + ".bias", backbone[l].bias);
  }
  fn("regression_head.weight", regression_head.weight);
  fn("regression_head.bias", regression_head.bias);
  fn("percentile_head.weight", percentile_head.weight);
  fn("percentile_head.bias", percentile_head.bias);
}

void Parameters::ForEachTensor(
    const std::function<void(const std::string&, std::span<const double>)>& fn)
    const {
  const_cast<Parameters*>(this)->ForEachTensor(
      [&](const std::string& name, std::span<double> v) {
        fn(name, std::span<const double>(v.data(), v.size()));
      });
}

std::size_t Parameters::size() const {
  std::size_t n = 0;
  ForEachTensor([&](const std::string&, std::span<const double> v) {
    n += v.size();
  });
  return n;
}

DualHeadModel DualHeadModel::Initialize(const ModelConfig& config) {
  Parameters p = Shape(config.input_dim, config.hidden);
  std::mt19937_64 rng(config.seed);
  auto fill = [&](Dense& layer) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& w : layer.weight) w = u(rng);
  };
  for (Dense& layer : p.backbone) fill(layer);
  fill(p.regression_head);
  fill(p.percentile_head);
  return DualHeadModel(std::move(p));
}

DualHeadModel DualHeadModel::Zeros(std::size_t input_dim,
                                   const std::vector<std::size_t>& hidden) {
  return DualHeadModel(Shape(input_dim, hidden));
}

DualHeadModel DualHeadModel::FromParameters(Parameters params) {
  // Re-derive the shape to validate consistency.
  std::vector<std::size_t> hidden;
  for (const Dense& layer : params.backbone) hidden.push_back(layer.out);
  const std::size_t in = params.backbone.empty() ? 0 : params.backbone[0].in;
  const Parameters shape = Shape(in, hidden);
  for (std::size_t l = 0; l < shape.backbone.size(); ++l) {
    if (params.backbone[l].in != shape.backbone[l].in ||
        params.backbone[l].weight.size() != shape.backbone[l].weight.size() ||
        params.backbone[l].bias.size() != shape.backbone[l].bias.size()) {
      throw ValidationError("backbone layer " + std::to_string(l) +
                            " has inconsistent shape");
    }
  }
  for (const Dense* head : {&params.regression_head, &params.percentile_head}) {
    if (head->in != hidden.back() || head->out != 1 ||
        head->weight.size() != head->in || head->bias.size() != 1) {
      throw ValidationError("head shape does not match last hidden layer");
    }
  }
  return DualHeadModel(std::move(params));
}

std::size_t DualHeadModel::input_dim() const {
  return params_.backbone.empty() ? 0 : params_.backbone.front().in;
}

Prediction DualHeadModel::Forward(std::span<const double> x) const {
  assert(x.size() == input_dim());
  const auto acts = BackboneActivations(params_, x);
  const std::vector<double>& h = acts.back();
  Prediction out;
  out.y_hat = Softplus(HeadLogit(params_.regression_head, h));
  out.p_hat = Logistic(HeadLogit(params_.percentile_head, h));
  return out;
}

ParameterGradients DualHeadModel::Backward(std::span<const double> x,
                                           const Upstream& upstream) const {
  assert(x.size() == input_dim());
  ParameterGradients g = ZeroLike(params_);
  if (upstream.d_yhat == 0.0 && upstream.d_phat == 0.0) return g;

  const auto acts = BackboneActivations(params_, x);
  const std::vector<double>& h = acts.back();
  std::vector<double> dh(h.size(), 0.0);

  if (upstream.d_yhat != 0.0) {
    const Dense& head = params_.regression_head;
    // d softplus(z) / dz = logistic(z)
    const double dz = upstream.d_yhat * Logistic(HeadLogit(head, h));
    for (std::size_t i = 0; i < h.size(); ++i) {
      g.regression_head.weight[i] = dz * h[i];
      dh[i] += dz * head.weight[i];
    }
    g.regression_head.bias[0] = dz;
  }
  if (upstream.d_phat != 0.0) {
    const Dense& head = params_.percentile_head;
    const double p = Logistic(HeadLogit(head, h));
    const double dz = upstream.d_phat * p * (1.0 - p);
    for (std::size_t i = 0; i < h.size(); ++i) {
      g.percentile_head.weight[i] = dz * h[i];
      dh[i] += dz * head.weight[i];
    }
    g.percentile_head.bias[0] = dz;
  }

  for (std::size_t l = params_.backbone.size(); l-- > 0;) {
    const Dense& layer = params_.backbone[l];
    const std::vector<double>& out = acts[l + 1];
    const std::vector<double>& in = acts[l];
    Dense& gl = g.backbone[l];
    std::vector<double> din(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double da = dh[o] * (1.0 - out[o] * out[o]);
      gl.bias[o] = da;
      const double* row = layer.weight.data() + o * layer.in;
      double* grow = gl.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        grow[i] = da * in[i];
        din[i] += da * row[i];
      }
    }
    dh = std::move(din);
  }
  return g;
}

void DualHeadModel::SgdStep(const ParameterGradients& grads,
                            double learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw ValidationError("learning rate must be > 0");
  }
  grads.ForEachTensor([](const std::string& name, std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) {
        throw NumericError("non-finite gradient for " + name + "[" +
                           std::to_string(i) + "]");
      }
    }
  });
  std::vector<std::span<const double>> flat;
  grads.ForEachTensor([&](const std::string&, std::span<const double> v) {
    flat.push_back(v);
  });
  std::size_t t = 0;
  params_.ForEachTensor([&](const std::string& name, std::span<double> v) {
    if (t >= flat.size() || flat[t].size() != v.size()) {
      throw ValidationError("gradient shape mismatch at " + name);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] -= learning_rate * flat[t][i];
    }
    ++t;
  });
}

std::vector<std::uint8_t> SaveModel(const DualHeadModel& model) {
  const Parameters& p = model.params();
  io::ByteWriter w;
  w.Magic(io::kModelMagic);
  w.BeginRecord();
  w.U64(model.input_dim());
  w.U64(p.backbone.size());
  for (const Dense& layer : p.backbone) w.U64(layer.out);
  w.EndRecord();
  p.ForEachTensor([&](const std::string&, std::span<const double> v) {
    w.BeginRecord();
    w.U64(v.size());
    for (double d : v) w.F64(d);
    w.EndRecord();
  });
  return w.Take();
}

DualHeadModel LoadModel(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  r.ExpectMagic(io::kModelMagic);
  r.BeginRecord();
  std::size_t at = r.offset();
  const std::uint64_t input_dim = r.U64();
  if (input_dim == 0 || input_dim > (1u << 20)) {
    throw DecodeError(at, "implausible input_dim");
  }
  at = r.offset();
  const std::uint64_t layers = r.U64();
  if (layers == 0 || layers > 64) throw DecodeError(at, "implausible layer count");
  std::vector<std::size_t> hidden;
  for (std::uint64_t l = 0; l < layers; ++l) {
    at = r.offset();
    const std::uint64_t width = r.U64();
    if (width == 0 || width > (1u << 16)) {
      throw DecodeError(at, "implausible hidden width");
    }
    hidden.push_back(width);
  }
  r.EndRecord();

  DualHeadModel model = DualHeadModel::Zeros(input_dim, hidden);
  model.mutable_params().ForEachTensor(
      [&](const std::string& name, std::span<double> v) {
        r.BeginRecord();
        const std::size_t count_at = r.offset();
        const std::uint64_t count = r.U64();
        if (count != v.size()) {
          throw DecodeError(count_at, name + " has " + std::to_string(count) +
                                          " values, expected " +
                                          std::to_string(v.size()));
        }
        for (double& d : v) d = r.F64();
        r.EndRecord();
      });
  r.ExpectEnd();
  return model;
}

}  // namespace pctl
