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

// Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.h"
#include "stub_backbone.h"
#include "tenet/config.h"
#include "tenet/experiment.h"
#include "tenet/log.h"
#include "tenet/loss.h"
#include "tenet/metrics.h"
#include "tenet/model.h"
#include "tenet/predictor.h"
#include "tenet/trainer.h"
#include "tenet/vocab.h"
#include "test_util.h"
#include "vocab_oracle.h"

namespace tenet {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Outcome vocabulary_oracle() {
  std::mt19937_64 rng(2024);
  int mismatches = 0, broken = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto corpus = testing::random_corpus(rng, 100);
    const std::int64_t min_count = 1 + static_cast<std::int64_t>(rng() % 4);
    const std::int64_t min_length = 1 + static_cast<std::int64_t>(rng() % 4);
    const std::int64_t size = 1 + static_cast<std::int64_t>(rng() % 25);
    const auto table = count_corpus(corpus);
    const auto v = build_vocabulary(table, min_count, min_length, size);
    const auto [words, counts] =
        testing::oracle_vocabulary(corpus, min_count, min_length, size);
    if (v.words() != words || v.counts() != counts) ++mismatches;
    if (!testing::vocabulary_invariants_hold(v, table, min_count, min_length, size)) {
      ++broken;
    }
  }
  return {mismatches == 0 && broken == 0,
          "50 corpora, " + std::to_string(mismatches) + " oracle mismatches, " +
              std::to_string(broken) + " invariant violations"};
}

Outcome bce_accuracy() {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    torch::manual_seed(trial);
    const auto b = 1 + static_cast<std::int64_t>(rng() % 16);
    const auto n = 1 + static_cast<std::int64_t>(rng() % 64);
    const auto z = torch::randn({b, n}, torch::kDouble) * (1.0 + rng() % 40);
    const auto y = torch::randint(0, 2, {b, n}).to(torch::kDouble);
    const double got = bce_loss(z, y).item<double>();
    const auto want = static_cast<double>(
        testing::bce_oracle(testing::to_vector(z), testing::to_vector(y)));
    worst = std::max(worst, std::abs(got - want) / want);
  }
  const double zero = bce_loss(torch::zeros({3, 5}, torch::kDouble),
                               torch::randint(0, 2, {3, 5}).to(torch::kDouble))
                          .item<double>();
  const double zero_err = std::abs(zero - std::log(2.0));
  const double extreme = bce_loss(torch::tensor({1000.0f, -1000.0f}),
                                  torch::tensor({0.0f, 1.0f}))
                             .item<double>();
  return {worst <= 1e-6 && zero_err <= 1e-9 && std::isfinite(extreme),
          "max rel err " + fmt(worst) + ", |zero - ln2| " + fmt(zero_err) +
              ", loss at |z|=1000 " + fmt(extreme)};
}

Outcome gradient_check() {
  BackboneSpec spec;
  spec.name = "linear_stub_2x2";
  spec.pretrained = false;
  auto model = build_model(spec, 91, 12, 2, 2, 11);
  model->to(torch::kDouble);
  torch::manual_seed(3);
  const auto x = torch::randn({4, 3, 2, 2}, torch::kDouble);
  const auto ct = torch::randint(0, 2, {4, 91}).to(torch::kDouble);
  const auto wt = torch::randint(0, 2, {4, 12}).to(torch::kDouble);
  const auto err = testing::max_gradient_error(model->parameters(), [&] {
    const auto out = model->forward(x);
    return total_loss(out.class_logits, ct, out.word_logits, wt).total;
  });
  return {err <= 1e-4 && model->spec().feature_dim <= 8,
          "feature_dim " + std::to_string(model->spec().feature_dim) +
              ", max rel err " + fmt(err)};
}

double grad_abs_sum(torch::nn::Module& m) {
  double total = 0.0;
  for (const auto& p : m.parameters()) {
    if (p.grad().defined()) total += p.grad().abs().sum().item<double>();
  }
  return total;
}

Outcome weight_isolation() {
  BackboneSpec spec;
  spec.name = "linear_stub_2x2";
  spec.pretrained = false;
  auto model = build_model(spec, 91, 12, 2, 2, 0);
  torch::manual_seed(5);
  const auto x = torch::randn({4, 3, 2, 2});
  const auto ct = torch::randint(0, 2, {4, 91}).to(torch::kFloat);
  const auto wt = torch::randint(0, 2, {4, 12}).to(torch::kFloat);

  model->zero_grad();
  auto out = model->forward(x);
  bce_loss(out.class_logits, ct).backward();
  const bool class_ok = grad_abs_sum(*model->caption_head) == 0.0 &&
                        grad_abs_sum(*model->classification_head) > 0.0 &&
                        grad_abs_sum(model->backbone()) > 0.0;
  model->zero_grad();
  out = model->forward(x);
  bce_loss(out.word_logits, wt).backward();
  const bool word_ok = grad_abs_sum(*model->classification_head) == 0.0 &&
                       grad_abs_sum(*model->caption_head) > 0.0 &&
                       grad_abs_sum(model->backbone()) > 0.0;

  std::vector<EncodedSample> samples;
  for (int i = 0; i < 10; ++i) {
    samples.push_back({i, torch::randn({3, 2, 2}),
                       (torch::rand({91}) < 0.1).to(torch::kFloat),
                       (torch::rand({12}) < 0.5).to(torch::kFloat)});
  }
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  for (int i = 0; i < 12; ++i) {
    words.push_back(std::string(3, static_cast<char>('a' + i)));
    counts.push_back(20 - i);
  }
  HyperParams params;
  params.num_epochs = 2;
  params.batch_size = 3;
  params.height = 2;
  params.width = 2;
  auto& stub = dynamic_cast<testing::LinearStub&>(model->backbone());
  stub.calls = 0;
  const auto result = train(model, EncodedDataset(samples), params,
                            Vocabulary(words, counts, 1, 3));
  const int steps = static_cast<int>(result.log.size());
  const bool once = stub.calls.load() == steps;
  return {class_ok && word_ok && once,
          std::string("class-only isolation ") + (class_ok ? "ok" : "broken") +
              ", word-only isolation " + (word_ok ? "ok" : "broken") +
              ", backbone passes " + std::to_string(stub.calls.load()) +
              " over " + std::to_string(steps) + " steps"};
}

torch::Tensor bits_tensor(const std::vector<int>& bits) {
  std::vector<float> f(bits.begin(), bits.end());
  return torch::tensor(f);
}

Outcome metrics_oracle() {
  std::mt19937_64 rng(31);
  int mismatches = 0;
  std::vector<EncodedSample> samples;
  std::vector<Prediction> preds;
  HyperParams params;
  params.top_c = 3;
  params.top_w = 10;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> ct(91), wt(40);
    for (auto& b : ct) b = static_cast<int>(rng() % 8 == 0);
    for (auto& b : wt) b = static_cast<int>(rng() % 3 == 0);
    std::vector<std::int64_t> c(91), w(40);
    std::iota(c.begin(), c.end(), 0);
    std::iota(w.begin(), w.end(), 0);
    std::shuffle(c.begin(), c.end(), rng);
    std::shuffle(w.begin(), w.end(), rng);
    c.resize(3);
    w.resize(10);
    Prediction p{trial, c, std::vector<float>(3), w, std::vector<float>(10)};
    const auto ctt = bits_tensor(ct), wtt = bits_tensor(wt);
    const auto acc = score_prediction(p, ctt, wtt, params);
    const double t = static_cast<double>(testing::count_hits_oracle(c, ct)) / 3.0;
    const double e = static_cast<double>(testing::count_hits_oracle(w, wt)) / 10.0;
    if (acc.acc_t != t || acc.acc_e != e || acc.overall != (t + e) / 2.0) ++mismatches;
    samples.push_back({trial, torch::zeros({3, 1, 1}), ctt, wtt});
    preds.push_back(p);
  }
  const auto base = evaluate_predictions(preds, EncodedDataset(samples), params);
  const bool mean_exact = base.mean_overall == (base.mean_acc_t + base.mean_acc_e) / 2.0;
  bool permutation_ok = true;
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<EncodedSample> s;
    std::vector<Prediction> p;
    for (auto i : order) {
      s.push_back(samples[i]);
      p.push_back(preds[i]);
    }
    const auto r = evaluate_predictions(p, EncodedDataset(s), params);
    permutation_ok = permutation_ok && r.mean_overall == base.mean_overall &&
                     r.mean_acc_t == base.mean_acc_t && r.mean_acc_e == base.mean_acc_e;
  }
  return {mismatches == 0 && mean_exact && permutation_ok,
          "1000 instances, " + std::to_string(mismatches) +
              " oracle mismatches, overall mean " + (mean_exact ? "exact" : "inexact") +
              ", permutation " + (permutation_ok ? "invariant" : "sensitive")};
}

Outcome top_k_oracle() {
  std::mt19937_64 rng(41);
  int mismatches = 0, transform_mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = 1 + rng() % 100;
    const auto v = testing::random_scores(rng, n);
    const auto k = static_cast<std::int64_t>(1 + rng() % n);
    const auto got = top_k(v, k).indices;
    if (got != testing::top_k_oracle(v, k)) ++mismatches;
    std::vector<float> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::exp(v[i]) * 4.0f - 1.0f;
    if (top_k(w, k).indices != got) ++transform_mismatches;
  }
  return {mismatches == 0 && transform_mismatches == 0,
          "1000 vectors with ties, " + std::to_string(mismatches) +
              " oracle mismatches, " + std::to_string(transform_mismatches) +
              " monotone-transform mismatches"};
}

Outcome fixture_overfit() {
  testing::TempDir dir;
  auto config = fixture_preset();
  config.output_dir = dir.path().string();
  const auto data = prepare_data(config);
  const auto& params = config.params;
  const EncodedDataset train_set(data.train, data.vocab, params, true);
  auto model = build_model(config.backbone, params.num_classes,
                           static_cast<std::int64_t>(data.vocab.size()),
                           params.height, params.width, params.seed);
  TrainOptions options;
  options.augment = config.augment;
  const auto result = train(model, train_set, params, data.vocab, options);
  const auto report = evaluate(model, train_set, params);
  const double final_loss = result.epochs.back().mean_total_loss;
  return {report.mean_overall >= 0.95 && final_loss < 0.05,
          std::to_string(train_set.size()) + " images, " +
              std::to_string(params.num_epochs) + " epochs, mean overall " +
              fmt(report.mean_overall) + ", final epoch total_loss " + fmt(final_loss)};
}

Outcome cli_determinism() {
  testing::TempDir dir;
  std::string rows[2];
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("run" + std::to_string(run));
    const auto command = std::string("'") + TENET_CLI +
                         "' run-experiment --fixture --seed 3 --output-dir '" +
                         out.string() + "' --log-level error";
    const auto r = testing::run_command(command);
    if (r.exit_code != 0) {
      return {false, "run " + std::to_string(run) + " exited with " +
                         std::to_string(r.exit_code)};
    }
    std::ifstream in(out / "results.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    rows[run] = ss.str();
  }
  const bool same = !rows[0].empty() && rows[0] == rows[1];
  std::string first_row = rows[0].substr(rows[0].find('\n') + 1);
  if (!first_row.empty() && first_row.back() == '\n') first_row.pop_back();
  return {same, std::string(same ? "identical" : "different") + " rows: " + first_row};
}

}  // namespace
}  // namespace tenet

int main() {
  using tenet::Outcome;
  tenet::log::set_level(tenet::log::Level::kWarn);
  tenet::testing::register_stub_backbones();
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"vocabulary matches brute-force oracle", tenet::vocabulary_oracle},
      {"BCE matches high-precision oracle and is stable", tenet::bce_accuracy},
      {"gradients match central finite differences", tenet::gradient_check},
      {"head losses are isolated, one backbone pass per step", tenet::weight_isolation},
      {"accuracy metrics match counting oracle", tenet::metrics_oracle},
      {"top_k matches full-sort oracle", tenet::top_k_oracle},
      {"fixture overfit", tenet::fixture_overfit},
      {"run-experiment is deterministic per seed", tenet::cli_determinism},
  };
  int failures = 0;
  int number = 1;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << number
              << ": " << name << " (" << outcome.detail << ")" << std::endl;
    if (!outcome.pass) ++failures;
    ++number;
  }
  return failures == 0 ? 0 : 1;
}
