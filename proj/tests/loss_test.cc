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

#include "tenet/loss.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "tenet/error.h"

namespace tenet {
namespace {

TEST(BceLoss, WorkedExample) {
  const auto loss =
      bce_loss(torch::tensor({{0.5f, -0.3f}}), torch::tensor({{1.0f, 0.0f}}));
  const auto want = testing::bce_oracle({0.5, -0.3}, {1.0, 0.0});
  EXPECT_NEAR(static_cast<double>(want), 0.5142161143, 1e-9);
  EXPECT_NEAR(loss.item<double>(), static_cast<double>(want), 1e-6);
}

TEST(BceLoss, ZeroLogitsGiveLn2) {
  for (auto dtype : {torch::kFloat, torch::kDouble}) {
    const auto z = torch::zeros({4, 7}, dtype);
    const auto y = torch::randint(0, 2, {4, 7}).to(dtype);
    const double tol = dtype == torch::kDouble ? 1e-12 : 1e-7;
    EXPECT_NEAR(bce_loss(z, y).item<double>(), std::log(2.0), tol);
  }
}

TEST(BceLoss, ExtremeLogitsStayFinite) {
  const auto z = torch::tensor({1000.0f, -1000.0f, 1000.0f, -1000.0f});
  const auto y = torch::tensor({0.0f, 1.0f, 1.0f, 0.0f});
  const auto loss = bce_loss(z, y).item<double>();
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, 500.0, 1e-3);
}

TEST(BceLoss, MatchesLongDoubleOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 40);
  std::uniform_real_distribution<double> scale(0.1, 30.0);
  for (int trial = 0; trial < 100; ++trial) {
    torch::manual_seed(trial);
    const auto b = dim(rng), n = dim(rng);
    const auto z = torch::randn({b, n}, torch::kDouble) * scale(rng);
    const auto y = torch::randint(0, 2, {b, n}).to(torch::kDouble);
    const double got = bce_loss(z, y).item<double>();
    const auto want = testing::bce_oracle(testing::to_vector(z), testing::to_vector(y));
    EXPECT_LE(std::abs(got - static_cast<double>(want)) / static_cast<double>(want), 1e-6);
  }
}

TEST(BceLoss, NonNegativeAndZeroOnlyInTheLimit) {
  const auto y = torch::tensor({1.0, 0.0}, torch::kDouble);
  const auto near_perfect = bce_loss(torch::tensor({40.0, -40.0}, torch::kDouble), y);
  EXPECT_GE(near_perfect.item<double>(), 0.0);
  EXPECT_LT(near_perfect.item<double>(), 1e-15);
}

TEST(BceLoss, ShapeMismatchThrows) {
  EXPECT_THROW(bce_loss(torch::zeros({2, 3}), torch::zeros({3, 2})), ShapeError);
  EXPECT_THROW(bce_loss(torch::zeros({2, 3}), torch::zeros({6})), ShapeError);
}

TEST(TotalLoss, IsWeightedSumOfParts) {
  torch::manual_seed(1);
  const auto cl = torch::randn({3, 5});
  const auto ct = torch::randint(0, 2, {3, 5}).to(torch::kFloat);
  const auto wl = torch::randn({3, 9});
  const auto wt = torch::randint(0, 2, {3, 9}).to(torch::kFloat);
  const auto plain = total_loss(cl, ct, wl, wt);
  EXPECT_NEAR(plain.total.item<double>(),
              bce_loss(cl, ct).item<double>() + bce_loss(wl, wt).item<double>(), 1e-6);
  const auto weighted = total_loss(cl, ct, wl, wt, 0.25);
  EXPECT_NEAR(weighted.total.item<double>(),
              plain.class_part.item<double>() + 0.25 * plain.word_part.item<double>(),
              1e-6);
}

}  // namespace
}  // namespace tenet
