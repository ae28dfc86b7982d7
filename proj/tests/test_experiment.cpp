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

#include "hdldp/experiment.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdldp/exact_sum.hpp"
#include "hdldp/rng.hpp"

using namespace hdldp;

namespace {

ExperimentConfig small_uniform_config() {
  GeneratorConfig gen;
  gen.kind = GeneratorKind::kUniform;
  gen.n = 2000;
  gen.d = 16;
  gen.seed = 5;
  ExperimentConfig cfg;
  cfg.source.generator = gen;
  cfg.mechanism = MechanismKind::kLaplace;
  cfg.total_eps = 1.0;
  cfg.m = 4;
  cfg.trials = 3;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("mse and euclidean deviation") {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{0.0, 0.0};
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(a, b) == doctest::Approx(0.5).epsilon(1e-15));

  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(13), y(13);
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    for (auto& v : y) v = rng.uniform(-2.0, 2.0);
    const double l2 = euclidean_deviation(x, y);
    CHECK(l2 * l2 == doctest::Approx(13.0 * mse(x, y)).epsilon(1e-12));
  }

  const std::vector<double> short_vec{1.0};
  CHECK_THROWS_AS(mse(a, short_vec), std::invalid_argument);
}

TEST_CASE("ks statistic") {
  // empirical = exact uniform grid against the uniform cdf
  std::vector<double> grid(1000);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = (static_cast<double>(i) + 0.5) / 1000.0;
  }
  const double ks =
      ks_statistic(grid, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ks == doctest::Approx(0.0005).epsilon(1e-10));

  // shifted sample is far from the model
  std::vector<double> shifted(1000);
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = grid[i] + 0.4;
  const double ks_shift =
      ks_statistic(shifted, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ks_shift > 0.35);
}

TEST_CASE("run_experiment is deterministic and none-recalibration is the baseline") {
  ExperimentConfig cfg = small_uniform_config();
  RecalibrationConfig none;
  none.regularizer = Regularizer::kNone;
  RecalibrationConfig l1;
  l1.regularizer = Regularizer::kL1;
  cfg.recalibrations = {none, l1};

  const ExperimentReport a = run_experiment(cfg);
  const ExperimentReport b = run_experiment(cfg);
  auto ja = a.to_json();
  auto jb = b.to_json();
  ja.erase("wall_ms");
  jb.erase("wall_ms");
  CHECK(ja == jb);

  CHECK(a.methods.size() == 3);
  CHECK(a.method("baseline").per_trial_mse == a.method("none").per_trial_mse);
  CHECK(a.method("baseline").last_theta == a.method("none").last_theta);

  // a different seed moves the numbers
  cfg.seed = 100;
  const ExperimentReport c = run_experiment(cfg);
  CHECK(c.method("baseline").per_trial_mse != a.method("baseline").per_trial_mse);
}

TEST_CASE("run_experiment is invariant to the thread count") {
  ExperimentConfig cfg = small_uniform_config();
  cfg.trials = 5;
  RecalibrationConfig l1;
  l1.regularizer = Regularizer::kL1;
  cfg.recalibrations = {l1};
  cfg.threads = 1;
  const ExperimentReport serial = run_experiment(cfg);
  cfg.threads = 2;
  const ExperimentReport parallel = run_experiment(cfg);
  CHECK(serial.method("baseline").per_trial_mse ==
        parallel.method("baseline").per_trial_mse);
  CHECK(serial.method("l1").per_trial_mse == parallel.method("l1").per_trial_mse);
}

TEST_CASE("square wave passes through under gating at a large budget") {
  GeneratorConfig gen;
  gen.kind = GeneratorKind::kUniform;
  gen.n = 3000;
  gen.d = 10;
  gen.seed = 3;
  ExperimentConfig cfg;
  cfg.source.generator = gen;
  cfg.mechanism = MechanismKind::kSquareWave;
  cfg.total_eps = 5000.0;
  cfg.m = 10;
  cfg.trials = 2;
  cfg.seed = 17;
  RecalibrationConfig l1;
  l1.regularizer = Regularizer::kL1;
  RecalibrationConfig l2;
  l2.regularizer = Regularizer::kL2;
  cfg.recalibrations = {l1, l2};
  const ExperimentReport report = run_experiment(cfg);
  CHECK(report.method("l1").per_trial_mse ==
        report.method("baseline").per_trial_mse);
  CHECK(report.method("l1").last_theta == report.method("baseline").last_theta);
  CHECK(report.method("l2").last_theta == report.method("baseline").last_theta);
}

TEST_CASE("laplace enhancement on the gaussian dataset, smoke scale") {
  GeneratorConfig gen;
  gen.kind = GeneratorKind::kGaussian;
  gen.n = 20000;
  gen.d = 50;
  gen.seed = 12;
  ExperimentConfig cfg;
  cfg.source.generator = gen;
  cfg.mechanism = MechanismKind::kLaplace;
  cfg.total_eps = 0.8;
  cfg.m = 0;  // all dimensions
  cfg.trials = 10;
  cfg.seed = 2311;
  RecalibrationConfig l1;
  l1.regularizer = Regularizer::kL1;
  RecalibrationConfig l2;
  l2.regularizer = Regularizer::kL2;
  cfg.recalibrations = {l1, l2};
  const ExperimentReport report = run_experiment(cfg);
  int l1_wins = 0, l2_wins = 0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    l1_wins += report.method("l1").per_trial_mse[t] <
               report.method("baseline").per_trial_mse[t];
    l2_wins += report.method("l2").per_trial_mse[t] <
               report.method("baseline").per_trial_mse[t];
  }
  CHECK(l1_wins >= 9);
  CHECK(l2_wins >= 9);
}

TEST_CASE("validate_framework on a small laplace run") {
  GeneratorConfig gen;
  gen.kind = GeneratorKind::kUniform;
  gen.n = 2000;
  gen.d = 20;
  gen.seed = 8;
  ValidationConfig cfg;
  cfg.source.generator = gen;
  cfg.mechanism = MechanismKind::kLaplace;
  cfg.total_eps = 1.0;
  cfg.m = 5;
  cfg.trials = 300;
  cfg.seed = 404;
  cfg.threads = 2;
  const ValidationReport report = validate_framework(cfg);

  // model: lambda = 2m/eps = 10 -> variance 200 over r = 500 reports
  CHECK(report.model.delta == 0.0);
  CHECK(report.model.sigma2 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(report.ks < 0.1);
  // the Gaussian-approximation error bound dominates the observed gap up to
  // the Monte Carlo resolution of 300 trials
  CHECK(report.ks <= report.berry_esseen + 1.63 / std::sqrt(300.0));

  ExactSum mass;
  for (double m : report.bin_mass) mass.add(m);
  CHECK(mass.value() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.deviations.size() == cfg.trials);

  ValidationConfig bad = cfg;
  bad.trials = 50;
  CHECK_THROWS_AS(validate_framework(bad), std::invalid_argument);
}

TEST_CASE("benchmark table reproduces the case study") {
  BenchmarkConfig cfg;
  cfg.mechanisms = {MechanismKind::kPiecewise, MechanismKind::kSquareWave};
  for (int k = 1; k <= 10; ++k) {
    cfg.values.values.push_back(0.1 * k);
    cfg.values.probs.push_back(0.1);
  }
  cfg.total_eps = 0.1;
  cfg.m = 100;
  cfg.r = 10000.0;
  cfg.xi = {0.001, 0.01, 0.05, 0.1};
  const BenchmarkTable table = benchmark_mechanisms(cfg);

  REQUIRE(table.probabilities.size() == 4);
  CHECK(table.probabilities[0][0] == doctest::Approx(3.46e-5).epsilon(0.05));
  CHECK(table.probabilities[3][1] == doctest::Approx(1.0).epsilon(1e-3));

  // probabilities are nondecreasing along the xi grid per mechanism
  for (std::size_t k = 0; k < cfg.mechanisms.size(); ++k) {
    for (std::size_t i = 1; i < cfg.xi.size(); ++i) {
      CHECK(table.probabilities[i][k] >= table.probabilities[i - 1][k]);
    }
  }

  BenchmarkConfig empty = cfg;
  empty.xi.clear();
  CHECK_THROWS_AS(benchmark_mechanisms(empty), std::invalid_argument);
}

TEST_CASE("dataset source validation") {
  DatasetSource none;
  CHECK_THROWS_AS(none.load(), std::invalid_argument);
  DatasetSource both;
  both.generator = GeneratorConfig{};
  both.csv_path = "x.csv";
  CHECK_THROWS_AS(both.load(), std::invalid_argument);
}

TEST_CASE("experiment report json carries config and seed") {
  ExperimentConfig cfg = small_uniform_config();
  const ExperimentReport report = run_experiment(cfg);
  const auto j = report.to_json();
  CHECK(j.at("seed") == cfg.seed);
  CHECK(j.at("config").at("eps") == cfg.total_eps);
  CHECK(j.at("config").at("dataset").contains("generator"));
  const ExperimentConfig echo = ExperimentConfig::from_json(j.at("config"));
  CHECK(echo.total_eps == cfg.total_eps);
  CHECK(echo.seed == cfg.seed);
}
