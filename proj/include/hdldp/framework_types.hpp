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

#ifndef HDLDP_FRAMEWORK_TYPES_HPP_
#define HDLDP_FRAMEWORK_TYPES_HPP_

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace hdldp {

/// Discrete distribution of the original values in one dimension: support
/// points with probabilities summing to 1. Supports live in the mechanism's
/// native input domain ([-1,1], or [0,1] for Square Wave).
struct ValueDistribution {
  std::vector<double> values;
  std::vector<double> probs;

  void validate() const;

  nlohmann::json to_json() const;
  static ValueDistribution from_json(const nlohmann::json& j);

  /// Single atom at `value` with probability 1.
  static ValueDistribution point(double value);
};

/// Gaussian approximation of the estimation deviation in one dimension:
/// theta_hat_j - theta_bar_j ~ N(delta, sigma2) at expected report count r.
struct DimensionDeviation {
  double delta = 0.0;
  double sigma2 = 0.0;
  double r = 0.0;
};

/// Per-dimension Gaussian deviation model; the joint density factorizes over
/// dimensions because every dimension is perturbed independently.
struct DeviationModel {
  std::vector<DimensionDeviation> dims;

  std::size_t dimensions() const { return dims.size(); }

  nlohmann::json to_json() const;
  static DeviationModel from_json(const nlohmann::json& j);
};

}  // namespace hdldp

#endif  // HDLDP_FRAMEWORK_TYPES_HPP_
