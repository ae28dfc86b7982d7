//
// Copyright 2026 The hdldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "hdldp/hdr4me.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdldp/framework.hpp"
#include "hdldp/rng.hpp"
#include "oracles.hpp"

using namespace hdldp;

namespace {

ValueDistribution tenths() {
  ValueDistribution vd;
  for (int k = 1; k <= 10; ++k) {
    vd.values.push_back(0.1 * k);
    vd.probs.push_back(0.1);
  }
  return vd;
}

DeviationModel uniform_model(std::size_t d, double delta, double sigma2) {
  DeviationModel model;
  model.dims.assign(d, DimensionDeviation{delta, sigma2, 1000.0});
  return model;
}

}  // namespace

TEST_CASE("soft threshold branches") {
  const std::vector<double> theta{0.5, 0.1, -0.5};
  const std::vector<double> lam{0.2, 0.2, 0.2};
  const auto out = recalibrate_l1(theta, lam);
  CHECK(out[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == doctest::Approx(-0.3).epsilon(1e-15));

  const std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK(recalibrate_l1(theta, zeros) == theta);

  const std::vector<double> short_lam{0.1};
  CHECK_THROWS_AS(recalibrate_l1(theta, short_lam), std::invalid_argument);
  const std::vector<double> negative{-0.1, 0.0, 0.0};
  CHECK_THROWS_AS(recalibrate_l1(theta, negative), std::invalid_argument);
}

TEST_CASE("l2 shrinkage") {
  const std::vector<double> theta{1.0};
  const std::vector<double> lam{0.5};
  CHECK(recalibrate_l2(theta, lam)[0] == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> zero{0.0};
  CHECK(recalibrate_l2(theta, zero) == theta);
  const std::vector<double> short_lam{};
  CHECK_THROWS_AS(recalibrate_l2(theta, short_lam), std::invalid_argument);
}

TEST_CASE("solvers minimize their objectives (grid oracle)") {
  Rng rng(2718);
  const double step = 1e-4;
  for (int rep = 0; rep < 10000; ++rep) {
    const double theta_hat = rng.uniform(-2.0, 2.0);
    const double lam = rng.uniform(0.0, 2.0);
    const std::vector<double> th{theta_hat};
    const std::vector<double> lv{lam};

    const double l1_out = recalibrate_l1(th, lv)[0];
    const double l1_grid = oracle::grid_argmin(
        [&](double x) {
          return 0.5 * (x - theta_hat) * (x - theta_hat) + lam * std::fabs(x);
        },
        -2.5, 2.5, step);
    CHECK(std::fabs(l1_out - l1_grid) <= 1e-4);

    const double l2_out = recalibrate_l2(th, lv)[0];
    const double l2_grid = oracle::grid_argmin(
        [&](double x) {
          return 0.5 * (x - theta_hat) * (x - theta_hat) + lam * x * x;
        },
        -2.5, 2.5, step);
    CHECK(std::fabs(l2_out - l2_grid) <= 1e-4);
  }
}

TEST_CASE("objective basics and minimizer property") {
  const std::vector<double> a{1.0};
  const std::vector<double> zero{0.0};
  const std::vector<double> one{1.0};
  CHECK(objective(a, a, zero, Regularizer::kL1) == 0.0);
  CHECK(objective(zero, one, one, Regularizer::kL1) == 0.5);

  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> theta_hat(4), lam(4);
    for (auto& x : theta_hat) x = rng.uniform(-2.0, 2.0);
    for (auto& w : lam) w = rng.uniform(0.0, 1.5);
    const auto l1 = recalibrate_l1(theta_hat, lam);
    CHECK(objective(l1, theta_hat, lam, Regularizer::kL1) <=
          objective(theta_hat, theta_hat, lam, Regularizer::kL1) + 1e-15);
    const auto l2 = recalibrate_l2(theta_hat, lam);
    CHECK(objective(l2, theta_hat, lam, Regularizer::kL2) <=
          objective(theta_hat, theta_hat, lam, Regularizer::kL2) + 1e-15);
  }
}

TEST_CASE("shrinkage and sign preservation properties") {
  Rng rng(31);
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<double> theta_hat(8), lam(8);
    for (auto& x : theta_hat) x = rng.uniform(-3.0, 3.0);
    for (auto& w : lam) w = rng.uniform(0.0, 2.0);
    for (auto reg : {Regularizer::kL1, Regularizer::kL2}) {
      const auto out = reg == Regularizer::kL1 ? recalibrate_l1(theta_hat, lam)
                                               : recalibrate_l2(theta_hat, lam);
      double norm_out = 0.0, norm_in = 0.0;
      for (std::size_t j = 0; j < out.size(); ++j) {
        norm_out += out[j] * out[j];
        norm_in += theta_hat[j] * theta_hat[j];
        CHECK(out[j] * theta_hat[j] >= 0.0);           // sign preserved
        CHECK(std::fabs(out[j]) <= std::fabs(theta_hat[j]));  // coordinatewise
      }
      CHECK(norm_out <= norm_in);
    }
  }
}

TEST_CASE("l1 weights from the deviation model") {
  // benchmark case study, piecewise: sigma ~ 23.09, delta = 0, kappa = 3
  const DimensionDeviation pw = deviation_model(
      MechanismSpec::make(MechanismKind::kPiecewise, 0.001), tenths(), 10000.0);
  DeviationModel model;
  model.dims.assign(4, pw);
  const auto w = l1_weights(model, 3.0);
  CHECK(w[0] == doctest::Approx(69.27).epsilon(1e-3));
  CHECK(w[0] == 3.0 * std::sqrt(pw.sigma2));

  // vanishing noise gates to pass-through
  const auto gated = l1_weights(uniform_model(3, 0.0, 1e-30), 3.0);
  CHECK(gated == std::vector<double>{0.0, 0.0, 0.0});
  // without the threshold the tiny weight is kept
  const auto kept = l1_weights(uniform_model(3, 0.0, 1e-30), 3.0, false);
  CHECK(kept[0] > 0.0);

  // square wave case study: bound ~ 0.067 <= 1, always gated
  const DimensionDeviation sw = deviation_model(
      MechanismSpec::make(MechanismKind::kSquareWave, 0.001), tenths(), 10000.0);
  DeviationModel sw_model;
  sw_model.dims.assign(2, sw);
  CHECK(operational_sup(sw, 3.0) == doctest::Approx(0.0673).epsilon(1e-2));
  CHECK(l1_weights(sw_model, 3.0) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("l2 weights") {
  DeviationModel model = uniform_model(3, 0.0, 533.210);
  const std::vector<double> proxy{1.0, 0.0, -2.0};
  const auto w = l2_weights(model, proxy, 3.0, 0.05);
  // sigma ~ 23.09 -> sup ~ 69.27; divided by 2*max(|proxy|, clamp)
  CHECK(w[0] == doctest::Approx(34.64).epsilon(1e-3));
  CHECK(w[1] == doctest::Approx(69.27 / 0.1).epsilon(1e-3));  // clamp at 0.05
  CHECK(w[2] == doctest::Approx(69.27 / 4.0).epsilon(1e-3));

  // sup below 2 gates to zero
  const auto gated = l2_weights(uniform_model(3, 0.0, 0.01), proxy, 3.0, 0.05);
  CHECK(gated == std::vector<double>{0.0, 0.0, 0.0});

  CHECK_THROWS_AS(l2_weights(model, proxy, 3.0, 0.0), std::invalid_argument);
  const std::vector<double> short_proxy{1.0};
  CHECK_THROWS_AS(l2_weights(model, short_proxy, 3.0, 0.05),
                  std::invalid_argument);
}

TEST_CASE("improvement probability") {
  // piecewise case study blown up to 100 dimensions: the per-dimension
  // central mass 2 Phi(1/23.09) - 1 ~ 0.0345 makes the bound reach 1
  DeviationModel model = uniform_model(100, 0.0, 533.2103529696597);
  const double per_dim = normal_interval_mass(-1.0 / std::sqrt(533.2103529696597),
                                              1.0 / std::sqrt(533.2103529696597));
  CHECK(per_dim == doctest::Approx(0.034542601589549415).epsilon(1e-10));
  CHECK(improvement_probability(model, Regularizer::kL1) ==
        doctest::Approx(1.0).epsilon(1e-15));

  // no noise: bound collapses to zero
  CHECK(improvement_probability(uniform_model(5, 0.0, 1e-30), Regularizer::kL1) ==
        doctest::Approx(0.0));

  // nondecreasing in sigma
  double last = -1.0;
  for (double s2 : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double p = improvement_probability(uniform_model(10, 0.0, s2),
                                             Regularizer::kL2);
    CHECK(p >= last);
    last = p;
  }

  CHECK_THROWS_AS(improvement_probability(model, Regularizer::kNone),
                  std::invalid_argument);
}

TEST_CASE("recalibrate dispatch and gating safety") {
  const std::vector<double> theta{0.4, -0.8, 0.1};
  DeviationModel tiny_model = uniform_model(3, 0.0, 1e-30);

  RecalibrationConfig cfg;
  cfg.regularizer = Regularizer::kNone;
  auto res = recalibrate(theta, tiny_model, cfg);
  CHECK(res.theta_star == theta);

  // all-gated weights: theta passes through bitwise, gates reported
  cfg.regularizer = Regularizer::kL1;
  res = recalibrate(theta, tiny_model, cfg);
  CHECK(res.theta_star == theta);
  CHECK(res.gated == std::vector<bool>{true, true, true});

  cfg.regularizer = Regularizer::kL2;
  res = recalibrate(theta, tiny_model, cfg);
  CHECK(res.theta_star == theta);

  // json round-trip of the config
  const auto j = cfg.to_json();
  const RecalibrationConfig back = RecalibrationConfig::from_json(j);
  CHECK(back.regularizer == Regularizer::kL2);
  CHECK(back.kappa == cfg.kappa);
}
