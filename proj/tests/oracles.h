// Copyright 2026 The TENet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference computations shared by unit and acceptance tests.

#ifndef TENET_TESTS_ORACLES_H_
#define TENET_TESTS_ORACLES_H_

#include <torch/torch.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace tenet::testing {

// Mean binary cross entropy in long double, written from the definition
// -[y log s + (1 - y) log(1 - s)] with s = 1 / (1 + e^-z), using
// log s = -log1p(e^-z) and log(1 - s) = -z - log1p(e^-z) for z >= 0
// (mirrored for z < 0).
inline long double bce_oracle(const std::vector<double>& logits,
                              const std::vector<double>& targets) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const long double z = logits[i];
    const long double y = targets[i];
    long double log_s, log_1ms;
    if (z >= 0) {
      const long double t = std::log1p(std::exp(-z));
      log_s = -t;
      log_1ms = -z - t;
    } else {
      const long double t = std::log1p(std::exp(z));
      log_s = z - t;
      log_1ms = -t;
    }
    sum += -(y * log_s + (1.0L - y) * log_1ms);
  }
  return sum / static_cast<long double>(logits.size());
}

inline std::vector<double> to_vector(const torch::Tensor& t) {
  const auto c = t.to(torch::kDouble).contiguous().flatten();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

// Full stable sort by (value desc, index asc) with NaN last, then truncate.
inline std::vector<std::int64_t> top_k_oracle(const std::vector<float>& values,
                                              std::int64_t k) {
  std::vector<std::int64_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    const bool na = std::isnan(values[a]);
    const bool nb = std::isnan(values[b]);
    if (na || nb) return !na && nb;
    return values[a] > values[b];
  });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

// Values from a small integer grid so ties are frequent.
inline std::vector<float> random_scores(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> grid(-5, 5);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(grid(rng)) * 0.5f;
  return v;
}

// Hits of `indices` against a 0/1 target, by explicit membership test.
inline std::int64_t count_hits_oracle(const std::vector<std::int64_t>& indices,
                                      const std::vector<int>& target) {
  std::int64_t hits = 0;
  for (std::size_t pos = 0; pos < target.size(); ++pos) {
    if (target[pos] != 1) continue;
    if (std::find(indices.begin(), indices.end(),
                  static_cast<std::int64_t>(pos)) != indices.end()) {
      ++hits;
    }
  }
  return hits;
}

// Largest relative discrepancy between autograd gradients of `loss_fn` with
// respect to `params` and central finite differences. Parameters must be
// double precision.
template <typename LossFn>
double max_gradient_error(std::vector<torch::Tensor> params, LossFn loss_fn,
                          double eps = 1e-5) {
  for (auto& p : params) {
    if (p.grad().defined()) p.grad().zero_();
  }
  loss_fn().backward();
  double worst = 0.0;
  torch::NoGradGuard no_grad;
  for (auto& p : params) {
    auto flat = p.view({-1});
    const auto analytic = p.grad().view({-1}).clone();
    for (std::int64_t i = 0; i < flat.numel(); ++i) {
      const double orig = flat[i].item<double>();
      flat[i] = orig + eps;
      const double up = loss_fn().template item<double>();
      flat[i] = orig - eps;
      const double down = loss_fn().template item<double>();
      flat[i] = orig;
      const double numeric = (up - down) / (2 * eps);
      const double a = analytic[i].item<double>();
      const double scale = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / scale);
    }
  }
  return worst;
}

}  // namespace tenet::testing

#endif  // TENET_TESTS_ORACLES_H_
