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

#ifndef HDLDP_FREQUENCY_HPP_
#define HDLDP_FREQUENCY_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdldp/hdr4me.hpp"
#include "hdldp/mechanisms.hpp"
#include "json.hpp"

namespace hdldp {

// Frequency estimation reduces to mean estimation: every categorical value
// becomes a one-hot vector, each entry is perturbed like a numeric dimension
// with budget eps/(2m), and the per-entry means are the frequencies. The 2 in
// the denominator covers the two entries that differ between any pair of
// categories.

/// Category counts per dimension; every dimension needs at least two.
struct CategoricalSchema {
  std::vector<std::uint32_t> categories;

  void validate() const;
  std::size_t dimensions() const { return categories.size(); }

  nlohmann::json to_json() const;
  static CategoricalSchema from_json(const nlohmann::json& j);
};

/// n x d matrix of category indices, row-major.
struct CategoricalDataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<std::uint32_t> values;

  std::uint32_t at(std::size_t row, std::size_t col) const {
    return values[row * d + col];
  }
};

/// One-hot encoding of a category index among v categories.
std::vector<double> encode(std::uint32_t category_index, std::uint32_t v);

struct FrequencyEstimate {
  // Per dimension, per category. `raw` is the direct estimate and may exit
  // [0,1]; `frequencies` is raw after postprocess() and lies on the simplex.
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> frequencies;
  double eps_per_entry = 0.0;

  nlohmann::json to_json() const;
};

/// Clips negatives to zero and renormalizes to sum 1; an all-zero vector
/// falls back to uniform.
std::vector<double> postprocess(std::span<const double> frequencies);

/// Full pipeline: one-hot expansion, dimension sampling, perturbation of
/// every entry with eps/(2m), aggregation, optional re-calibration of the
/// underlying means, and simplex postprocessing.
FrequencyEstimate estimate_frequencies(
    const CategoricalDataset& data, const CategoricalSchema& schema,
    MechanismKind kind, double total_eps, std::size_t m, std::uint64_t seed,
    const RecalibrationConfig* recalibration = nullptr);

/// Same pipeline with a caller-supplied mechanism (tests inject noiseless
/// stubs here). `eps_per_entry` is recorded in the result but the mechanism
/// is used as given.
FrequencyEstimate estimate_frequencies_with(
    const CategoricalDataset& data, const CategoricalSchema& schema,
    const Mechanism& mechanism, double eps_per_entry, std::size_t m,
    std::uint64_t seed, const RecalibrationConfig* recalibration = nullptr);

/// Categorical CSV: header dim_0,...,dim_{d-1}, integer category indices.
CategoricalDataset load_categorical_csv(const std::string& path);

}  // namespace hdldp

#endif  // HDLDP_FREQUENCY_HPP_
