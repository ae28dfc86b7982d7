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

#ifndef HDLDP_DATASET_HPP_
#define HDLDP_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace hdldp {

/// Affine parameters of one normalized column: the raw range [min, max] that
/// was mapped onto [-1,1]. Kept so raw values and means can be recovered.
struct ColumnScale {
  double min = 0.0;
  double max = 0.0;
};

/// An n x d matrix of user records, row-major. After normalize() every entry
/// lies in [-1,1] and `scaling` records the per-column raw ranges.
struct Dataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> values;        // n * d, row-major
  std::vector<ColumnScale> scaling;  // empty until normalized

  double& at(std::size_t row, std::size_t col) { return values[row * d + col]; }
  double at(std::size_t row, std::size_t col) const {
    return values[row * d + col];
  }

  bool normalized() const { return !scaling.empty(); }

  /// Column mean computed with exact summation.
  double column_mean(std::size_t col) const;
  std::vector<double> column_means() const;
};

enum class GeneratorKind { kGaussian, kPoisson, kUniform };

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

/// Seeded synthetic-data description. The seed fully determines the output;
/// columns are generated from independent substreams of (seed, column).
struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::kUniform;
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;

  // Gaussian family: a leading fraction of columns gets mean mu_high, the
  // rest mu_low; every column has standard deviation sigma.
  double sigma = 1.0 / 16.0;
  double high_fraction = 0.1;
  double mu_high = 0.9;
  double mu_low = 0.0;

  // Poisson family: per-column expectation drawn uniformly from this range.
  double lambda_min = 1.0;
  double lambda_max = 99.0;

  void validate() const;

  nlohmann::json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& j);
};

/// Generates a synthetic dataset and normalizes it column-wise into [-1,1].
Dataset generate(const GeneratorConfig& config);

/// Per-column distribution parameter used by generate(): the Gaussian mean,
/// the Poisson expectation, or 0 for uniform columns. Deterministic in the
/// config, so tests and reports can recover the ground truth.
std::vector<double> generator_column_means(const GeneratorConfig& config);

/// Maps every column affinely from [col_min, col_max] onto [-1,1]. Constant
/// columns map to all zeros. Map parameters are retained in `scaling`.
Dataset normalize(const Dataset& dataset);

Dataset load_csv(const std::string& path);
void save_csv(const Dataset& dataset, const std::string& path);

}  // namespace hdldp

#endif  // HDLDP_DATASET_HPP_
