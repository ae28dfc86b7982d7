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

#ifndef HDLDP_EXPERIMENT_HPP_
#define HDLDP_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdldp/collector.hpp"
#include "hdldp/dataset.hpp"
#include "hdldp/framework.hpp"
#include "hdldp/hdr4me.hpp"
#include "hdldp/mechanisms.hpp"
#include "json.hpp"

namespace hdldp {

/// Mean squared error (1/d) * sum (est_j - true_j)^2.
double mse(std::span<const double> estimate, std::span<const double> truth);

/// Euclidean deviation ||est - true||_2; equals sqrt(d * mse).
double euclidean_deviation(std::span<const double> estimate,
                           std::span<const double> truth);

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);

/// Either a generator description or a CSV file of already-collected data.
struct DatasetSource {
  std::optional<GeneratorConfig> generator;
  std::optional<std::string> csv_path;

  Dataset load() const;

  nlohmann::json to_json() const;
  static DatasetSource from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
  DatasetSource source;
  MechanismKind mechanism = MechanismKind::kLaplace;
  double total_eps = 1.0;
  std::size_t m = 0;  // 0 means every dimension
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<RecalibrationConfig> recalibrations;
  // Subtract the prior-averaged report bias before re-calibration (bounded
  // mechanisms only; needs the discretized value distributions).
  bool calibrate_with_prior = false;
  std::size_t discretize_bins = 32;
  int threads = 1;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct MethodResult {
  std::string name;
  double mse_mean = 0.0;
  double mse_std = 0.0;
  std::vector<double> per_trial_mse;
  std::vector<double> last_theta;  // estimate from the final trial
};

struct ExperimentReport {
  std::vector<MethodResult> methods;  // methods[0] is the baseline aggregate
  std::vector<double> theta_bar;
  DeviationModel model;  // in the [-1,1] data domain
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  nlohmann::json config_echo;

  const MethodResult& method(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Runs trials of perturb -> aggregate -> (calibrate) -> re-calibrate and
/// reports per-method MSE statistics. Deterministic given the seed; the
/// trial loop may run on several threads without changing any result.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct ValidationConfig {
  DatasetSource source;
  MechanismKind mechanism = MechanismKind::kLaplace;
  double total_eps = 1.0;
  std::size_t m = 0;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t track_dim = 0;
  std::size_t histogram_bins = 40;
  std::size_t discretize_bins = 64;
  int threads = 1;

  nlohmann::json to_json() const;
  static ValidationConfig from_json(const nlohmann::json& j);
};

struct ValidationReport {
  DimensionDeviation model;  // tracked dimension, data domain
  double ks = 0.0;
  double berry_esseen = 0.0;
  std::vector<double> deviations;  // sorted observed deviations
  std::vector<double> bin_mid;
  std::vector<double> bin_mass;       // sums to 1
  std::vector<double> model_density;  // model pdf at bin midpoints
  nlohmann::json config_echo;

  nlohmann::json to_json() const;
  void save_histogram_csv(const std::string& path) const;
};

/// Repeats the pipeline and compares the empirical distribution of the
/// tracked dimension's deviation against the analytic Gaussian.
ValidationReport validate_framework(const ValidationConfig& config);

struct BenchmarkConfig {
  std::vector<MechanismKind> mechanisms;
  ValueDistribution values;  // original-value distribution, native domains
  double total_eps = 0.1;
  std::size_t m = 100;
  double r = 10000.0;
  std::vector<double> xi;

  nlohmann::json to_json() const;
  static BenchmarkConfig from_json(const nlohmann::json& j);
};

struct BenchmarkTable {
  std::vector<MechanismKind> mechanisms;
  std::vector<double> xi;
  // probabilities[i][k]: supremum probability at xi[i] for mechanisms[k]
  std::vector<std::vector<double>> probabilities;
  std::vector<DimensionDeviation> models;

  nlohmann::json to_json() const;
  void save_csv(const std::string& path) const;
};

/// Closed-form supremum-probability comparison of mechanisms on a shared
/// original-value distribution.
BenchmarkTable benchmark_mechanisms(const BenchmarkConfig& config);

}  // namespace hdldp

#endif  // HDLDP_EXPERIMENT_HPP_
